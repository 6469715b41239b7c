"""
The macro-averaged F1 metric, exactly
=====================================

Per-class F1 is computed from pooled token counts in exact rational
arithmetic, so hand-checkable cases come out as the fractions they are.
"""

from fractions import Fraction

from mgtdetect import confusion_counts, evaluate_report, format_pct, macro_f1

gold = [0, 0, 1, 1]
pred = [0, 1, 1, 1]

# class 0: P=1, R=1/2 -> F1 2/3; class 1: P=2/3, R=1 -> F1 4/5
score = macro_f1(gold, pred)
print("macro-F1:", score, "== 11/15:", score == Fraction(11, 15))
print("as a table percentage:", format_pct(score))

print(confusion_counts(gold, pred))

report = evaluate_report(gold, pred)
print(report.to_table())

# classes absent from gold and pred can still be averaged in
print("all_four policy:", format_pct(macro_f1(gold, pred, "all_four")))

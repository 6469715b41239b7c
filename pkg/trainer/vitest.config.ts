import { defineConfig } from 'vitest/config';

// The acceptance test runs a full smoke fine-tune; give it room.
export default defineConfig({
  test: {
    testTimeout: 600_000,
    hookTimeout: 600_000,
  },
});

export class TrainerError extends Error {
  constructor(message: string) {
    super(message);
    this.name = new.target.name;
  }
}

export class ConfigError extends TrainerError {}

export class KOutOfRangeError extends ConfigError {}

export class DataFormatError extends TrainerError {}

export class DetectorCliError extends TrainerError {}

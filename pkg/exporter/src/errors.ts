export class FormatError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "FormatError";
  }
}

export class ImageNotFoundError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ImageNotFoundError";
  }
}

export class ModelLoadError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ModelLoadError";
  }
}

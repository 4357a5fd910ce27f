export { BoundComplexHandle, lift } from "./complex.js";
export { features, generate_labels, kendall_tau, train_rank } from "./pipeline.js";
export type { LabelOptions, TrainValue } from "./pipeline.js";
export { CliError } from "./cli.js";

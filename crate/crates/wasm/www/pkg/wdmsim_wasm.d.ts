/* tslint:disable */
/* eslint-disable */

/**
 * Runs MRPR, AUR and LLR once each. `seed` is a JS number, so it is
 * truncated to an integer.
 */
export function compare(lambda_t: number, ratio: number, requests: number, seed: number): string;

/**
 * Failure probability under both bounds and the channel cost it implies
 * across repacking probabilities 0 to 0.99.
 */
export function failure_costs(mu_f: number, mu_h: number, var_f: number, var_h: number, threshold: number): string;

/**
 * Erlang-B blocking and repacking probability against offered load.
 */
export function load_curves(capacity: number, max_load: number, steps: number): string;

export function topology_text(): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly compare: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly failure_costs: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly load_curves: (a: number, b: number, c: number) => [number, number, number, number];
    readonly topology_text: () => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;

/* tslint:disable */
/* eslint-disable */

/**
 * The indicator scaling experiment as a JSON report.
 */
export function indicator_scaling(gamma: number, p: number, n: number): string;

/**
 * `[ξ_0, I(ξ_0), ξ_1, I(ξ_1), ...]` on `points` log-spaced frequencies in
 * `[xi_min, xi_max]`, `d = 1`.
 */
export function kernel_moment_curve(gamma: number, xi_min: number, xi_max: number, points: number): Float64Array;

/**
 * `[seminorm, x_0, f_0, L_0, x_1, f_1, L_1, ...]`: the `X^{γ,p}` seminorm
 * and the pointwise functional `L_{γ,p}f` on `[-1, 1]`.
 */
export function pointwise_profile(kind: string, param: number, gamma: number, p: number, n: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly indicator_scaling: (a: number, b: number, c: number) => [number, number, number, number];
    readonly kernel_moment_curve: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly pointwise_profile: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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

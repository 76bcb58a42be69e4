/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const context_coefficients: (a: number, b: number, c: number) => [number, number, number, number];
export const link_prediction: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number, k: number, l: bigint) => [number, number, number, number];
export const sample_graph: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number, number];
export const simulation_check: (a: number, b: number, c: number, d: number, e: number, f: bigint) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;

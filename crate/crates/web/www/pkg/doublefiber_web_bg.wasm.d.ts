/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const normal_form_fiber: (a: number, b: number) => [number, number];
export const origin_fiber: (a: number, b: number) => [number, number];
export const witness_limit: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;

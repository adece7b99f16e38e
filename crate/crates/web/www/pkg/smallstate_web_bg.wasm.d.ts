/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const currentSlice: (a: number, b: number, c: number) => [number, number, number, number];
export const observables: (a: number) => [number, number, number, number];
export const radialProfile: (a: number, b: number, c: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;

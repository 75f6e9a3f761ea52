/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_demo_free: (a: number, b: number) => void;
export const demo_cells: (a: number) => [number, number];
export const demo_index_bytes: (a: number) => number;
export const demo_is_empty: (a: number) => number;
export const demo_knn: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
export const demo_last_exact: (a: number) => number;
export const demo_last_pruned_leaves: (a: number) => bigint;
export const demo_last_visited_leaves: (a: number) => bigint;
export const demo_last_visited_rows: (a: number) => bigint;
export const demo_leaves: (a: number, b: number, c: number) => [number, number];
export const demo_len: (a: number) => number;
export const demo_new: (a: number, b: bigint, c: number, d: number, e: number) => [number, number, number];
export const demo_points: (a: number) => [number, number];
export const demo_region_count: (a: number) => number;
export const demo_set_mbr_pruning: (a: number, b: number) => void;
export const demo_world_t: (a: number) => number;
export const demo_world_x: (a: number) => number;
export const demo_world_y: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;

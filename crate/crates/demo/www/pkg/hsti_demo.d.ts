/* tslint:disable */
/* eslint-disable */

export class Demo {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * `[x_lo, y_lo, x_hi, y_hi, region]` per grid cell.
     */
    cells(): Float64Array;
    index_bytes(): number;
    is_empty(): boolean;
    /**
     * Runs a kNN query and returns `[oid, x, y, t, distance]` per neighbour,
     * nearest first. Stats for the query are available afterwards.
     */
    knn(x: number, y: number, t0: number, t1: number, k: number): Float64Array;
    /**
     * Whether the last query agreed with a brute-force scan.
     */
    last_exact(): boolean;
    last_pruned_leaves(): bigint;
    last_visited_leaves(): bigint;
    last_visited_rows(): bigint;
    /**
     * Octree leaves whose time extent overlaps `[t0, t1]`:
     * `[x_lo, y_lo, x_hi, y_hi, region, level, entries]` per leaf.
     */
    leaves(t0: number, t1: number): Float64Array;
    len(): number;
    /**
     * Generates `n` objects in the default 10000 x 10000 x 5000 world and
     * builds a cluster of `cluster_size` regions.
     */
    constructor(n: number, seed: bigint, clustered: boolean, cluster_size: number, xi: number);
    /**
     * `[x, y, t]` per object.
     */
    points(): Float64Array;
    region_count(): number;
    set_mbr_pruning(on: boolean): void;
    world_t(): number;
    world_x(): number;
    world_y(): number;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demo_free: (a: number, b: number) => void;
    readonly demo_cells: (a: number) => [number, number];
    readonly demo_index_bytes: (a: number) => number;
    readonly demo_is_empty: (a: number) => number;
    readonly demo_knn: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly demo_last_exact: (a: number) => number;
    readonly demo_last_pruned_leaves: (a: number) => bigint;
    readonly demo_last_visited_leaves: (a: number) => bigint;
    readonly demo_last_visited_rows: (a: number) => bigint;
    readonly demo_leaves: (a: number, b: number, c: number) => [number, number];
    readonly demo_len: (a: number) => number;
    readonly demo_new: (a: number, b: bigint, c: number, d: number, e: number) => [number, number, number];
    readonly demo_points: (a: number) => [number, number];
    readonly demo_region_count: (a: number) => number;
    readonly demo_set_mbr_pruning: (a: number, b: number) => void;
    readonly demo_world_t: (a: number) => number;
    readonly demo_world_x: (a: number) => number;
    readonly demo_world_y: (a: number) => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_table_dealloc: (a: number) => void;
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

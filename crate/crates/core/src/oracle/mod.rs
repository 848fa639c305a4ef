//! Brute-force checks: lattice shortest paths, geodesic enumeration and
//! uniqueness scans.

mod geodesics;
mod graph;
#[cfg(test)]
mod tests;

pub use geodesics::{enumerate_geodesics, uniqueness_scan, Ambiguity, GeodesicList, ScanReport};
pub use graph::{build_graph, oracle_distance, DiscretizationGraph, OracleResult, Region};

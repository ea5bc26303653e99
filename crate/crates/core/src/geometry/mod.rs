//! r-lattices, partitions of unity subordinate to them, and the metric d_φ.

mod index;
mod lattice;
mod metric;
mod partition;

pub use lattice::{build_lattice, covering_multiplicity, polar_grid, probe_grid, Lattice, Multiplicity};
pub use metric::{d_phi_estimate, MetricGraph};
pub use partition::{build_partition, eta, eta_derivative, BumpValue, Partition, PartitionCheck};

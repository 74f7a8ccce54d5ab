//! Builders and seeded random generators for the three bundled benchmark
//! families: capacity expansion on networks with edge failures, facility
//! location with facility disruptions, and staff rostering under demand
//! surges.

mod facility;
mod network;
mod random;
mod rostering;

pub use facility::{build_facility_location, FacilityLocationInstance};
pub use network::{build_network_design, parse_edge_list, NetworkDesignInstance};
pub use random::{generate_random_instance, Family, SizeSpec};
pub use rostering::{build_staff_rostering, StaffRosteringInstance};

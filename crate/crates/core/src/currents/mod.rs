//! Geodesic currents on the disk: boxes, the Liouville measure and sampled
//! laminations of quadratic differentials.

mod boxes;
mod lamination;

pub use boxes::{arc_offset, in_arc, liouville, DiskMobius, GeodesicBox};
pub use lamination::{
    atom_test, box_mass, discretized_liouville, flat_box, log2_boxes, log2_boxes_within,
    loop_angle, reconstruct_l1, sample_mu, sample_mu_flat, sample_mu_nu, sample_nu, sample_nu_flat,
    thurston_estimate, thurston_norm, Atom, BoxSample, LaminationKind, SampledLamination,
    ThurstonEstimate,
};

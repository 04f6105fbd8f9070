//! Persistence modules over a totally ordered index set, their barcodes,
//! filtrations and interleavings.

mod echelon;
mod filtered;
mod interleaving;
mod module;

pub use echelon::{Echelon, GradedMatrix};
pub use filtered::{filtered_barcode, filtered_echelon, persistent_homology, FilteredComplex};
pub use interleaving::{
    bottleneck_oracle, certify_distance, interleaving_distance, matched_interval_maps, shift_interleaving,
    trace_poset_weight, verify_interleaving, Extended, InterleavingCheck, MapFamily,
};
pub use module::{Barcode, Interval, PersistenceModule};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::field::Q;

/// Graded presentation of the module: one generator per basis vector of
/// each space (degree = position), one relation `t*e - phi(e)` per basis
/// vector that has a successor.
pub fn presentation(m: &PersistenceModule) -> GradedMatrix {
    let f = m.field;
    let offsets: Vec<usize> = m
        .dims
        .iter()
        .scan(0, |acc, &d| {
            let o = *acc;
            *acc += d;
            Some(o)
        })
        .collect();
    let mut row_degrees = Vec::new();
    let mut labels = Vec::new();
    for (i, &d) in m.dims.iter().enumerate() {
        for b in 0..d {
            row_degrees.push(i);
            labels.push(format!("e{i}_{b}"));
        }
    }
    let mut col_degrees = Vec::new();
    let mut columns = Vec::new();
    for (i, phi) in m.maps.iter().enumerate() {
        for b in 0..m.dims[i] {
            let mut col = vec![(offsets[i] + b, f.one())];
            for c in 0..m.dims[i + 1] {
                let x = &phi[(c, b)];
                if !x.is_zero() {
                    col.push((offsets[i + 1] + c, f.neg(x)));
                }
            }
            col.sort_by_key(|e| e.0);
            columns.push(col);
            col_degrees.push(i + 1);
        }
    }
    GradedMatrix::new(f, row_degrees, col_degrees, columns).expect("presentation is homogeneous").with_labels(labels)
}

/// Interval decomposition by column-echelon reduction of the presentation.
pub fn barcode(m: &PersistenceModule) -> Result<Barcode> {
    if !m.is_stabilized() {
        return Err(Error::NotStabilized);
    }
    let at = |d: usize| -> Q { m.indices[d].clone() };
    let intervals =
        presentation(m).reduce().intervals().into_iter().map(|(b, d)| Interval::new(at(b), d.map(at))).collect();
    Ok(Barcode::new(intervals))
}

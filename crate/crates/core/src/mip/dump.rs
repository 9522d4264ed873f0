use std::fmt::Write as _;
use std::io;
use std::path::Path;

use crate::mip::{MipModel, ObjSense};
use crate::scalar::Real;

/// Renders a model as plain text for debugging.
///
/// ```text
/// sense minimize
/// var <index> <lower> <upper> <kind> <objective>
/// row <index> <j>:<a_j> ... <sense> <rhs>
/// ```
pub fn dump_model<T: Real>(model: &MipModel<T>) -> String {
    let mut out = String::new();
    let sense = match model.sense {
        ObjSense::Minimize => "minimize",
        ObjSense::Maximize => "maximize",
    };
    let _ = writeln!(out, "sense {sense}");
    for (j, (v, c)) in model.variables.iter().zip(&model.objective).enumerate() {
        let _ = writeln!(out, "var {j} {} {} {} {c}", v.lower, v.upper, v.kind.as_str());
    }
    for (i, row) in model.constraints.iter().enumerate() {
        let _ = write!(out, "row {i}");
        for (j, a) in &row.coefficients {
            let _ = write!(out, " {j}:{a}");
        }
        let _ = writeln!(out, " {} {}", row.sense.as_str(), row.rhs);
    }
    out
}

pub fn write_model_dump<T: Real>(model: &MipModel<T>, path: impl AsRef<Path>) -> io::Result<()> {
    std::fs::write(path, dump_model(model))
}

//! The simplex solver on a small standalone LP.
//!
//! cargo run --example linear_program

use bpdd::lp::{lp_solve, ConstraintMatrix, LinearProgram, Sense};
use nalgebra::DMatrix;

fn main() -> bpdd::Result<()> {
    // maximize 3x + 2y  s.t.  x + y + s1 = 4,  x + 3y + s2 = 6,  x <= 3
    let a = DMatrix::from_row_slice(2, 4, &[1.0, 1.0, 1.0, 0.0, 1.0, 3.0, 0.0, 1.0]);
    let mut lp = LinearProgram::nonnegative(
        vec![3.0, 2.0, 0.0, 0.0],
        ConstraintMatrix::Dense(a),
        vec![4.0, 6.0],
        Sense::Maximize,
    );
    lp.upper[0] = 3.0;
    let r = lp_solve(&lp)?;
    println!(
        "status {:?}, objective {}, x = {:?}",
        r.status, r.objective_value, r.solution
    );
    println!("duals {:?}, gap {:.1e}", r.dual_multipliers, r.duality_gap);
    Ok(())
}

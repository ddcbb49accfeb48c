//! Cell counts, boundary maps and homology of small hypercubic complexes.
//!
//! cargo run --example lattice_homology

use toric_threshold::homology::{betti_numbers, HomologyBasis};
use toric_threshold::lattice::{CellComplex, Chain};
use toric_threshold::toric::{Sector, ToricCode3D};

fn main() -> toric_threshold::Result<()> {
    for (name, cx) in [
        ("3-torus L=3", CellComplex::torus(3, 3)?),
        ("4-torus L=2", CellComplex::torus(4, 2)?),
        ("open box 3x3x3", CellComplex::open_box(&[3, 3, 3])?),
    ] {
        println!(
            "{name:<15} cells {:?}  chi = {}  betti {:?}",
            cx.counts(),
            cx.euler_characteristic(),
            betti_numbers(&cx)?
        );
    }

    // boundary of a boundary is empty, cell by cell
    let cx = CellComplex::torus(3, 3)?;
    for k in 2..=3 {
        for i in 0..cx.count(k) {
            let c = Chain::from_indices(k, cx.count(k), [i]);
            assert!(cx.boundary(&cx.boundary(&c)?)?.is_empty());
        }
    }
    println!("d∘d = 0 on every 2- and 3-cell");

    // straight representatives pair with their detectors as the identity
    let h1 = HomologyBasis::new(&cx, 1)?;
    for (i, r) in h1.representatives().iter().enumerate() {
        let row: Vec<u8> = h1.detectors().iter().map(|d| r.pairing(d) as u8).collect();
        println!("loop {i}: weight {} pairs {row:?}", r.weight());
    }

    // the toric code's logical operators: strings meet membranes once
    let code = ToricCode3D::new(3)?;
    println!("toric code L=3: {} qubits", code.n_qubits());
    let membranes = code
        .logical_membranes()
        .iter()
        .map(|m| code.qubits_of(m, Sector::X))
        .collect::<toric_threshold::Result<Vec<_>>>()?;
    for (i, s) in code.logical_strings().iter().enumerate() {
        let row: Vec<u8> = membranes.iter().map(|m| s.pairing(m) as u8).collect();
        println!("string {i} x membranes: {row:?}");
    }
    Ok(())
}

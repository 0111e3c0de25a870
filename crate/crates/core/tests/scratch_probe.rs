use nodal_core::metrics::{positivity_area, AreaMethod, Disc};
use nodal_core::nadirashvili::{minimize_area, Candidate, MinimizeConfig};
use nodal_core::C64;

#[test]
fn probe_class_two() {
    let tight = MinimizeConfig {
        restarts: 3,
        max_evals: 600,
        area_budget: 200_000,
        seed: 7,
        warm_starts: Vec::new(),
    };
    let n2 = minimize_area(2, &tight).unwrap();
    println!(
        "N_2 = {:.8}, nu = {}, pairs = {:?}",
        n2.area(),
        n2.best.sign_changes(),
        n2.best.pairs()
    );

    // Rotations of Re z at various angles, budget 200k.
    for (p, q) in [(1.0f64, 0.0f64), (0.0, 1.0), (0.6, 0.8), (1.0, -0.3)] {
        let est = positivity_area(
            |z: C64| p * z.re + q * z.im,
            &Disc::unit(),
            200_000,
            AreaMethod::GridRefined,
        )
        .unwrap();
        println!(
            "Re((p-iq)z) p={p} q={q}: area {:.6} err {:.2e}",
            est.value, est.abs_error
        );
    }

    // The candidate the optimizer returned, remeasured at several budgets.
    let c = Candidate::from_pairs(&n2.best.pairs().to_vec(), 200_000).unwrap();
    println!("from_pairs area {:.6}", c.area().value);
    for b in [20_000usize, 200_000, 2_000_000] {
        let e = c.remeasure(b, AreaMethod::GridRefined).unwrap();
        println!("  budget {b}: {:.6} err {:.2e}", e.value, e.abs_error);
    }
    let mc = c
        .remeasure(2_000_000, AreaMethod::MonteCarlo { seed: 5 })
        .unwrap();
    println!("  monte carlo: {:.6} err {:.2e}", mc.value, mc.abs_error);
}

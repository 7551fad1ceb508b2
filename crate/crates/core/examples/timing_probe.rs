//! Scratch timing probe for the optimizer workloads (not shipped).

use std::time::Instant;

use hubbard_vqe::circuit::build_np_ansatz;
use hubbard_vqe::jw::jordan_wigner;
use hubbard_vqe::lattice::QubitLayout;
use hubbard_vqe::model::ModelConfig;
use hubbard_vqe::mpo::Mpo;
use hubbard_vqe::rng::{rng_from_seed, standard_normal};
use hubbard_vqe::vqe::{energy_gradient, energy_loss, run_vqe, VqeOptions};

fn main() {
    // single gradient evaluation on the 2x3 l=12 workload
    let m = ModelConfig { nx: 2, ny: 3, t: 1.0, u: 2.0, v: 0.0, d: 0.0, seed: 1 }
        .realize()
        .unwrap();
    let layout = QubitLayout::interleaved(6);
    let h = Mpo::from_pauli_sum(&jordan_wigner(&m, &layout).unwrap()).unwrap();
    let circuit = build_np_ansatz(&m.geometry, 12);
    println!("2x3 l=12: {} params, {} gates", circuit.n_params(), circuit.ops().len());
    let mut rng = rng_from_seed(2);
    let params: Vec<f64> = (0..circuit.n_params())
        .map(|_| 0.003 * standard_normal(&mut rng))
        .collect();

    let t0 = Instant::now();
    let e = energy_loss(&circuit, &params, &h, 64, 1e-12).unwrap();
    println!("energy eval: {:?} (E = {e:.6})", t0.elapsed());

    let t0 = Instant::now();
    let (e, g) = energy_gradient(&circuit, &params, &h, 64, 1e-12).unwrap();
    println!(
        "energy+gradient eval: {:?} (E = {e:.6}, |g|_inf = {:.3e})",
        t0.elapsed(),
        g.iter().fold(0.0f64, |a, x| a.max(x.abs()))
    );

    // a full single-restart protocol run on the 2x3 l=12 workload
    let opts = VqeOptions { restarts: 1, chi_max: 64, master_seed: 42, ..VqeOptions::default() };
    let t0 = Instant::now();
    let out = run_vqe(&m, &circuit, None, &opts).unwrap();
    let rec = &out.restarts[0];
    println!(
        "one 2x3 l=12 restart: {:?}, E = {:.6}, steps = {} (+{} warm), stop = {}",
        t0.elapsed(),
        rec.final_energy,
        rec.steps,
        rec.warm_steps,
        rec.termination.as_str()
    );
}

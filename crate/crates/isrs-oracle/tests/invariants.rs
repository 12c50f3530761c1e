use isrs_model::{Chi0, FrequencyGrid, Interaction, PhononMode, PulseState, SymmetryClass, C64};
use isrs_oracle::{
    build_total_hamiltonian, expect, initial_state, FockConfig, HamiltonianTerms, Observable, OracleSystem, PhononInit,
    Propagator, Method, Ref1Mode,
};
use isrs_perturb::WeightVariant;
use proptest::prelude::*;

fn class() -> impl Strategy<Value = SymmetryClass> {
    prop_oneof![Just(SymmetryClass::A), Just(SymmetryClass::EL), Just(SymmetryClass::ET)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn evolution_conserves_norm_and_photons(
        cls in class(),
        coupling in -3.0f64..3.0,
        u in -0.5f64..0.5, w in 0.0f64..0.5, phi in 0.0f64..3.0,
        q in -1.0f64..1.0,
        operator in any::<bool>(),
        tau in 0.1f64..2.0,
        theta in 0.0f64..1.6,
        br in -0.5f64..0.5, bi in -0.5f64..0.5,
    ) {
        let grid = FrequencyGrid::new(20.0, 1.0, 1).unwrap();
        let mode = PhononMode::new(1.0, 1.5, cls, coupling, f64::INFINITY).unwrap();
        let int = Interaction::new(tau, 1.0, 1.0).unwrap();
        let cfg = FockConfig { photon_cutoff: 1, phonon_cutoff: 3, ..Default::default() };
        let sys = OracleSystem::new(grid, &cfg, mode, int, Chi0::new(u, w, phi), WeightVariant::MainText).unwrap();
        let ref1 = if operator { Ref1Mode::Operator } else { Ref1Mode::MeanField(q) };
        let h = build_total_hamiltonian(&sys, &HamiltonianTerms::full(ref1)).unwrap();
        prop_assert!(h.hermiticity_error() < 1e-14);
        let pulse = PulseState::gaussian(grid, 0.7, 1.0, theta).unwrap();
        let (s0, _) = initial_state(&sys, &pulse, &PhononInit::Coherent(C64::new(br, bi))).unwrap();
        let s1 = s0.evolve(&Propagator::new(&h, tau, Method::Pade).unwrap()).unwrap();
        prop_assert!(s1.norm_error() < 1e-10);
        let n0 = expect(&sys, &s0, &Observable::TotalPhotonNumber).unwrap();
        let n1 = expect(&sys, &s1, &Observable::TotalPhotonNumber).unwrap();
        prop_assert!((n1 - n0).abs() < 1e-10);
    }
}

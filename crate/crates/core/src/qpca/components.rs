use num_complex::Complex64;

use super::{qpe_decompose, QpeConfig, SpectralEstimate};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, tol, trace_norm, ComplexMatrix, DensityMatrix, PureState, SpectralDecomposition};

/// Eigenvalues of a post-selected state closer than this form one eigenspace.
const COMPONENT_GAP: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct Component {
    pub estimate: f64,
    pub mass: f64,
    /// Dominant eigenvector of the post-selected state.
    pub eigenvector: PureState,
    /// Projector onto the dominant eigenspace of the post-selected state.
    pub eigenspace: ComplexMatrix,
    pub degenerate: bool,
}

#[derive(Clone, Debug)]
pub struct PrincipalComponents {
    pub components: Vec<Component>,
    pub warnings: Vec<String>,
}

/// The `top_k` heaviest self-tomography bins of `rho` with their eigenvectors.
/// Fewer are returned when fewer outcomes carry mass.
pub fn principal_components(rho: &DensityMatrix, cfg: &QpeConfig, top_k: usize) -> Result<PrincipalComponents> {
    check_top_k(top_k, rho.dim())?;
    components_of(&qpe_decompose(rho, rho, cfg)?, top_k)
}

fn check_top_k(top_k: usize, dim: usize) -> Result<()> {
    if top_k == 0 || top_k > dim {
        return Err(Error::Validation(format!("top_k must be in 1..={dim}, got {top_k}")));
    }
    Ok(())
}

/// Components from an existing self-tomography readout.
pub fn components_of(est: &SpectralEstimate, top_k: usize) -> Result<PrincipalComponents> {
    let dim = est.bins.first().map_or(0, |b| b.state.dim());
    check_top_k(top_k, dim)?;
    let mut bins: Vec<_> = est.bins.iter().collect();
    bins.sort_by(|a, b| b.mass.total_cmp(&a.mass).then(b.outcome.cmp(&a.outcome)));
    bins.truncate(top_k);

    let mut warnings = Vec::new();
    for (i, a) in bins.iter().enumerate() {
        for b in &bins[i + 1..] {
            if a.outcome.abs_diff(b.outcome) <= 1 {
                let msg = format!(
                    "components at {} and {} are within one bin width and may mix",
                    a.estimate, b.estimate
                );
                log::warn!("{msg}");
                warnings.push(msg);
            }
        }
    }

    let components = bins
        .into_iter()
        .map(|bin| {
            let decomp = hermitian_eig(bin.state.matrix())?;
            let top = decomp.clusters(COMPONENT_GAP).remove(0);
            let degenerate = top.len() > 1;
            if degenerate {
                let msg = format!("component at {} spans a {}-dimensional eigenspace", bin.estimate, top.len());
                log::warn!("{msg}");
                warnings.push(msg);
            }
            Ok(Component {
                estimate: bin.estimate,
                mass: bin.mass,
                eigenvector: decomp.eigenvectors()[0].clone(),
                eigenspace: decomp.projector(top),
                degenerate,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PrincipalComponents { components, warnings })
}

/// `⟨v|P|v⟩` with `P` the oracle eigenspace whose eigenvalue is nearest `eigenvalue`.
pub fn eigenspace_fidelity(v: &PureState, oracle: &SpectralDecomposition, eigenvalue: f64) -> f64 {
    v.expectation(&oracle.eigenspace_near(eigenvalue)).re
}

/// `tr(ρ_k M)` for the post-selected state of the bin nearest `bin_value`.
pub fn observable_on_component(
    rho: &DensityMatrix,
    cfg: &QpeConfig,
    bin_value: f64,
    observable: &ComplexMatrix,
) -> Result<f64> {
    if observable.rows() != rho.dim() || !observable.is_square() {
        return Err(Error::Shape("observable does not act on the state space".into()));
    }
    if observable.hermiticity_error() > tol::HERMITIAN {
        return Err(Error::Validation("observable is not Hermitian".into()));
    }
    let est = qpe_decompose(rho, rho, cfg)?;
    let bin = est.bin_near(bin_value).ok_or(Error::EmptyBin(bin_value))?;
    let value: Complex64 = bin.state.expectation(observable);
    if value.im.abs() > 1e-10 {
        return Err(Error::Invariant(format!("expectation has imaginary part {}", value.im)));
    }
    Ok(value.re)
}

/// `‖ρ − PρP‖₁` with `P` the projector onto the top `r` eigenvectors of `ρ`.
pub fn low_rank_projection_error(rho: &DensityMatrix, r: usize) -> Result<f64> {
    if r == 0 || r > rho.dim() {
        return Err(Error::Validation(format!("rank must be in 1..={}, got {r}", rho.dim())));
    }
    let p = hermitian_eig(rho.matrix())?.projector(0..r);
    let projected = p.dot(rho.matrix()).dot(&p);
    let mut diff = rho.matrix() - &projected;
    diff.hermitize();
    trace_norm(&diff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{density_with_spectrum, seeded_density, seeded_pure_state, Seeded};

    #[test]
    fn rank_one_recovers_state() {
        let psi = seeded_pure_state(&mut Seeded::new(40), 4);
        let pcs = principal_components(&psi.to_density(), &QpeConfig::exact(3), 1).unwrap();
        assert_eq!(pcs.components.len(), 1);
        assert!(pcs.components[0].eigenvector.fidelity(&psi) >= 1.0 - 1e-9);
        assert_eq!(pcs.components[0].estimate, 1.0);
    }

    #[test]
    fn diagonal_components_are_basis_states() {
        let rho = DensityMatrix::from_real_diagonal(&[0.75, 0.25]).unwrap();
        let pcs = principal_components(&rho, &QpeConfig::exact(4), 2).unwrap();
        let c = &pcs.components;
        assert_eq!((c[0].estimate, c[1].estimate), (0.75, 0.25));
        assert!(c[0].eigenvector.fidelity(&PureState::basis(2, 0)) >= 1.0 - 1e-9);
        assert!(c[1].eigenvector.fidelity(&PureState::basis(2, 1)) >= 1.0 - 1e-9);
        assert!(pcs.warnings.is_empty());
    }

    #[test]
    fn rank_two_in_dimension_eight() {
        let rho = density_with_spectrum(&mut Seeded::new(41), 8, &[0.75, 0.25]);
        let oracle = hermitian_eig(rho.matrix()).unwrap();
        let pcs = principal_components(&rho, &QpeConfig::exact(4), 2).unwrap();
        for c in &pcs.components {
            assert!(eigenspace_fidelity(&c.eigenvector, &oracle, c.estimate) >= 0.99);
        }
    }

    #[test]
    fn adjacent_bins_warn() {
        // both eigenvalues fall halfway between b=3 grid points
        let rho = DensityMatrix::from_real_diagonal(&[0.625, 0.375]).unwrap();
        let pcs = principal_components(&rho, &QpeConfig::exact(3), 2).unwrap();
        assert!(!pcs.warnings.is_empty());
    }

    #[test]
    fn flat_spectrum_flagged_degenerate() {
        let pcs = principal_components(&DensityMatrix::maximally_mixed(4), &QpeConfig::exact(3), 1).unwrap();
        let c = &pcs.components[0];
        assert!(c.degenerate);
        assert!(c.eigenspace.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-9);
    }

    #[test]
    fn top_k_bounds() {
        let rho = DensityMatrix::maximally_mixed(2);
        assert!(principal_components(&rho, &QpeConfig::exact(3), 0).is_err());
        assert!(principal_components(&rho, &QpeConfig::exact(3), 3).is_err());
    }

    #[test]
    fn observables_on_components() {
        let cfg = QpeConfig::exact(4);
        let rho = DensityMatrix::from_real_diagonal(&[0.75, 0.25]).unwrap();
        let z = ComplexMatrix::diag(&[1.0, -1.0]);
        assert!((observable_on_component(&rho, &cfg, 0.75, &ComplexMatrix::identity(2)).unwrap() - 1.0).abs() < 1e-12);
        assert!((observable_on_component(&rho, &cfg, 0.75, &z).unwrap() - 1.0).abs() < 1e-9);
        for r in [0.75, 0.25] {
            let got = observable_on_component(&rho, &cfg, r, rho.matrix()).unwrap();
            assert!((got - r).abs() < 1e-9);
        }
        assert!(matches!(observable_on_component(&rho, &cfg, 0.5, &z), Err(Error::EmptyBin(_))));
    }

    #[test]
    fn projection_error_is_discarded_mass() {
        let rho = DensityMatrix::from_real_diagonal(&[0.75, 0.25]).unwrap();
        assert!((low_rank_projection_error(&rho, 1).unwrap() - 0.25).abs() < 1e-12);
        assert!(low_rank_projection_error(&rho, 2).unwrap() < 1e-12);
        let mut rng = Seeded::new(42);
        for _ in 0..4 {
            let rho = seeded_density(&mut rng, 6, 6);
            let eigs = hermitian_eig(rho.matrix()).unwrap();
            for r in 1..=6 {
                let tail: f64 = eigs.eigenvalues()[r..].iter().sum();
                assert!((low_rank_projection_error(&rho, r).unwrap() - tail).abs() < 1e-10);
            }
        }
        assert!(low_rank_projection_error(&rho, 0).is_err());
    }
}

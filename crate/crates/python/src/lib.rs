//! Python bindings for the `profinite` crate.

use std::sync::Arc;

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyComplex;

use num_rational::Rational64;
use profinite::integral::action::parse_rational;
use profinite::integral::path_integral::{path_integral, Mode, ResultMode};
use profinite::integral::{frobenius_correlation, haar_measure, partition_function, ActionFunctional, CylinderMeasure};
use profinite::matrioshka::{block_decode, block_encode, build_partition_tree, Decoded, EncodingConvention, PartitionTree};
use profinite::tower::{make_tower, split_labels, validate_tower, CoherentElement, TowerKind, TowerSpec};
use profinite::{Error, Word};

create_exception!(profinite_py, ProfiniteError, PyException);

fn err(e: Error) -> PyErr {
    ProfiniteError::new_err(e.diagnostic())
}

/// A tower of finite groups with its partition tree.
#[pyclass(frozen)]
struct Tower {
    inner: Arc<profinite::Tower>,
    tree: PartitionTree,
}

impl Tower {
    fn element(&self, labels: &str) -> PyResult<CoherentElement> {
        CoherentElement::from_labels(&self.inner, &split_labels(labels)).map_err(err)
    }
}

#[pymethods]
impl Tower {
    /// `Tower("cyclotomic p=3 depth=2")`
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        let inner = make_tower(&TowerSpec::parse_line(spec).map_err(err)?).map_err(err)?;
        let tree = build_partition_tree(&inner, &EncodingConvention::default()).map_err(err)?;
        Ok(Tower { inner, tree })
    }

    #[getter]
    fn depth(&self) -> usize {
        self.inner.depth()
    }

    #[getter]
    fn orders(&self) -> Vec<usize> {
        self.inner.orders()
    }

    /// Labels of level `k`, in canonical order.
    fn labels(&self, k: usize) -> PyResult<Vec<String>> {
        Ok(self.inner.level(k).map_err(err)?.labels().to_vec())
    }

    /// Bit string of the element given as comma-separated labels.
    fn encode(&self, element: &str) -> PyResult<String> {
        Ok(self.tree.encode(&self.element(element)?).map_err(err)?.to_string())
    }

    /// Labels of the decoded element, or of every element in the decoded cell.
    fn decode(&self, bits: &str) -> PyResult<Vec<Vec<String>>> {
        let bits = profinite::matrioshka::parse_bits(bits).map_err(err)?;
        Ok(match self.tree.decode_bits(&bits).map_err(err)? {
            Decoded::Element(x) => vec![x.labels()],
            Decoded::Cell(cell) => cell.elements().iter().map(CoherentElement::labels).collect(),
        })
    }

    /// `b1:...|b2:...` block code.
    fn blocks(&self, element: &str) -> PyResult<String> {
        Ok(block_encode(&self.inner, &self.element(element)?).map_err(err)?.payload())
    }

    fn decode_blocks(&self, payload: &str) -> PyResult<Vec<String>> {
        let blocks = profinite::matrioshka::parse_block_payload(payload).map_err(err)?;
        Ok(block_decode(&self.inner, &blocks).map_err(err)?.labels())
    }

    fn is_inverse_system(&self) -> bool {
        validate_tower(&self.inner).is_inverse_system()
    }

    fn partition_function(&self, lam: f64) -> PyResult<f64> {
        partition_function(&self.inner, lam).map_err(err)
    }

    #[pyo3(signature = (primes, lam = 0.0))]
    fn frobenius_correlation<'py>(&self, py: Python<'py>, primes: Vec<u64>, lam: f64) -> PyResult<Bound<'py, PyComplex>> {
        let c = frobenius_correlation(&self.inner, &primes, lam).map_err(err)?;
        Ok(PyComplex::from_doubles(py, c.re, c.im))
    }

    fn __repr__(&self) -> String {
        format!("Tower('{}')", self.inner.spec())
    }
}

/// Cantor distance as `(numerator, denominator)`; `(0, 1)` for equal words.
#[pyfunction]
fn cantor_distance(x: &str, y: &str) -> PyResult<(u64, u128)> {
    let (x, y): (Word, Word) = (x.parse().map_err(err)?, y.parse().map_err(err)?);
    Ok(match profinite::cantor_distance(&x, &y).map_err(err)? {
        profinite::metric::CantorDistance::Zero => (0, 1),
        profinite::metric::CantorDistance::Pow(k) => (1, 1u128 << k.min(127)),
    })
}

#[pyfunction]
fn hamming(x: &str, y: &str) -> PyResult<usize> {
    let (x, y): (Word, Word) = (x.parse().map_err(err)?, y.parse().map_err(err)?);
    profinite::hamming(&x, &y).map_err(err)
}

/// Path integral over the level-`n` cylinders of a tower.
///
/// Returns `(value, delta_prev)` in exact mode and `(value, stderr)` when
/// `samples` and `seed` are given.
#[pyfunction]
#[pyo3(signature = (tower, w, q = None, hbar = 1.0, n = None, samples = None, seed = None))]
#[allow(clippy::too_many_arguments)]
fn path_integral_value<'py>(
    py: Python<'py>,
    tower: &str,
    w: Vec<f64>,
    q: Option<Vec<Vec<String>>>,
    hbar: f64,
    n: Option<usize>,
    samples: Option<u64>,
    seed: Option<u64>,
) -> PyResult<(Bound<'py, PyComplex>, f64)> {
    let spec = TowerSpec::parse_line(tower).map_err(err)?;
    let mu = if spec.kind == TowerKind::Binary {
        CylinderMeasure::cantor(spec.depth).map_err(err)?
    } else {
        haar_measure(&make_tower(&spec).map_err(err)?)
    };
    let q: Vec<Rational64> = q
        .unwrap_or_default()
        .iter()
        .flatten()
        .map(|t| parse_rational(t))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let s = ActionFunctional::new(q, w, hbar).map_err(err)?;
    let mode = match (samples, seed) {
        (Some(samples), Some(seed)) => Mode::MonteCarlo { samples, seed },
        (None, None) => Mode::Exact,
        _ => return Err(err(Error::Usage("samples and seed go together".into()))),
    };
    let r = path_integral(&mu, &s, mode, n.unwrap_or(spec.depth)).map_err(err)?;
    let extra = match r.mode {
        ResultMode::Exact => r.delta_prev.unwrap_or(f64::NAN),
        ResultMode::MonteCarlo { stderr, .. } => stderr,
    };
    Ok((PyComplex::from_doubles(py, r.value.re, r.value.im), extra))
}

#[pyfunction]
fn automorphism_count(group: &str) -> PyResult<usize> {
    let g = profinite::make_group(&profinite::GroupSpec::parse(group).map_err(err)?).map_err(err)?;
    Ok(profinite::enumerate_automorphisms(&g).map_err(err)?.len())
}

#[pyfunction]
fn group_order(group: &str) -> PyResult<usize> {
    let g = profinite::make_group(&profinite::GroupSpec::parse(group).map_err(err)?).map_err(err)?;
    Ok(g.order())
}

/// Runs the command line tool in-process; returns `(status, report body)`.
#[pyfunction]
fn run_cli(argv: Vec<String>) -> (i32, String) {
    let report = profinite::cli::run_argv(argv);
    (report.status, report.body())
}

#[pymodule]
fn profinite_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ProfiniteError", m.py().get_type::<ProfiniteError>())?;
    m.add("CONVENTION_VERSION", profinite::matrioshka::CONVENTION_VERSION)?;
    m.add_class::<Tower>()?;
    m.add_function(wrap_pyfunction!(cantor_distance, m)?)?;
    m.add_function(wrap_pyfunction!(hamming, m)?)?;
    m.add_function(wrap_pyfunction!(path_integral_value, m)?)?;
    m.add_function(wrap_pyfunction!(automorphism_count, m)?)?;
    m.add_function(wrap_pyfunction!(group_order, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}

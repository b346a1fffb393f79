//! Python bindings: `import cantorfam`.

use std::collections::BTreeSet;

use cantorfam::construct::{build_family as build, build_recipe as recipe, nonsdefinable_witness as nonsdef};
use cantorfam::io::FamilyFile;
use cantorfam::{
    calculus, check, io, rank, Error, Family, Ordinal, RankResult, SafetyAutomaton, Scheme, Sentence, Theory,
};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Theory", module = "cantorfam", frozen, eq, hash, from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyTheory(Theory);

#[pymethods]
impl PyTheory {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        text.parse().map(PyTheory).map_err(err)
    }

    fn bit(&self, i: usize) -> bool {
        self.0.bit(i)
    }

    /// The first `n` bits as a string of 0s and 1s.
    fn take(&self, n: usize) -> String {
        self.0.take(n).to_string()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Theory('{}')", self.0)
    }
}

#[pyclass(name = "Sentence", module = "cantorfam", frozen, eq, from_py_object)]
#[derive(Clone, PartialEq)]
struct PySentence(Sentence);

#[pymethods]
impl PySentence {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Sentence::parse(text).map(PySentence).map_err(err)
    }

    #[staticmethod]
    fn cylinder(prefix: &str) -> PyResult<Self> {
        Ok(PySentence(cantorfam::cylinder_sentence(&prefix.parse().map_err(err)?)))
    }

    fn eval(&self, t: &Bound<'_, PyAny>) -> PyResult<bool> {
        Ok(self.0.eval(&theory(t)?))
    }

    fn equivalent(&self, other: &Bound<'_, PyAny>) -> PyResult<bool> {
        Ok(cantorfam::semantically_equal(&self.0, &sentence(other)?))
    }

    /// Depth and allowed prefixes of the denoted clopen set.
    fn clopen(&self) -> PyResult<(u32, Vec<String>)> {
        let c = self.0.to_clopen().map_err(err)?;
        Ok((c.depth(), c.allowed().iter().map(|w| w.to_string()).collect()))
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Sentence('{}')", self.0)
    }
}

#[pyclass(name = "Scheme", module = "cantorfam", frozen, eq, from_py_object)]
#[derive(Clone, PartialEq)]
struct PyScheme(Scheme);

#[pymethods]
impl PyScheme {
    #[staticmethod]
    fn finite(sentences: Vec<Bound<'_, PyAny>>) -> PyResult<Self> {
        Ok(PyScheme(Scheme::Finite(sentences.iter().map(sentence).collect::<PyResult<_>>()?)))
    }

    #[staticmethod]
    fn diagram(t: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(PyScheme(Scheme::Diagram(theory(t)?)))
    }

    /// The sentences true throughout the closure of `f`.
    #[staticmethod]
    fn target(f: &PyFamily) -> Self {
        PyScheme(Scheme::ClosedTarget(f.0.closure().carrier()))
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }
}

#[pyclass(name = "Family", module = "cantorfam", frozen, eq, from_py_object)]
#[derive(Clone, PartialEq)]
struct PyFamily(Family);

fn theory(obj: &Bound<'_, PyAny>) -> PyResult<Theory> {
    match obj.cast::<PyTheory>() {
        Ok(t) => Ok(t.get().0.clone()),
        Err(_) => obj.extract::<String>()?.parse().map_err(err),
    }
}

fn sentence(obj: &Bound<'_, PyAny>) -> PyResult<Sentence> {
    match obj.cast::<PySentence>() {
        Ok(s) => Ok(s.get().0.clone()),
        Err(_) => Sentence::parse(&obj.extract::<String>()?).map_err(err),
    }
}

fn rank_tuple(r: RankResult) -> (Option<i64>, Option<u64>) {
    (r.rank_value(), r.degree())
}

#[pymethods]
impl PyFamily {
    #[staticmethod]
    fn empty() -> Self {
        PyFamily(Family::empty())
    }

    #[staticmethod]
    fn full_space() -> Self {
        PyFamily(Family::full_space())
    }

    #[staticmethod]
    fn explicit(points: Vec<Bound<'_, PyAny>>) -> PyResult<Self> {
        let points: BTreeSet<Theory> = points.iter().map(theory).collect::<PyResult<_>>()?;
        Ok(PyFamily(Family::explicit(points)))
    }

    /// A closed set given by a safety automaton, minus the listed theories.
    #[staticmethod]
    #[pyo3(signature = (states, edges, initial = 0, exclude = Vec::new()))]
    fn automaton(
        states: usize,
        edges: Vec<(usize, u8, usize)>,
        initial: usize,
        exclude: Vec<Bound<'_, PyAny>>,
    ) -> PyResult<Self> {
        if let Some(&(_, b, _)) = edges.iter().find(|e| e.1 > 1) {
            return Err(PyValueError::new_err(format!("edge label must be 0 or 1, got {b}")));
        }
        let edges: Vec<(usize, bool, usize)> = edges.into_iter().map(|(s, b, t)| (s, b == 1, t)).collect();
        let carrier = SafetyAutomaton::new(states, initial, &edges).map_err(err)?;
        let exclude = exclude.iter().map(theory).collect::<PyResult<Vec<_>>>()?;
        Family::regular(carrier, exclude).map(PyFamily).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        FamilyFile::parse(text).and_then(|f| f.to_family()).map(PyFamily).map_err(err)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        io::load_family(path).map(PyFamily).map_err(err)
    }

    fn to_json(&self) -> String {
        FamilyFile::from_family(&self.0).to_json()
    }

    fn save(&self, path: &str) -> PyResult<()> {
        io::save(path, &FamilyFile::from_family(&self.0)).map_err(err)
    }

    fn member(&self, t: &Bound<'_, PyAny>) -> PyResult<bool> {
        Ok(self.0.member(&theory(t)?))
    }

    fn __contains__(&self, t: &Bound<'_, PyAny>) -> PyResult<bool> {
        self.member(t)
    }

    fn restrict(&self, phi: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(PyFamily(self.0.restrict(&sentence(phi)?)))
    }

    fn restrict_scheme(&self, phi: &PyScheme) -> Self {
        PyFamily(self.0.restrict_scheme(&phi.0))
    }

    fn closure(&self) -> Self {
        PyFamily(self.0.closure())
    }

    fn is_e_closed(&self) -> bool {
        self.0.is_e_closed()
    }

    fn is_accumulation_point(&self, t: &Bound<'_, PyAny>) -> PyResult<bool> {
        Ok(self.0.is_accumulation_point(&theory(t)?))
    }

    fn union(&self, other: &PyFamily) -> Self {
        PyFamily(self.0.union(&other.0))
    }

    fn intersect(&self, other: &PyFamily) -> Self {
        PyFamily(self.0.intersect(&other.0))
    }

    fn is_subset(&self, other: &PyFamily) -> bool {
        self.0.is_subset(&other.0)
    }

    fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The number of members, or `None` when infinite.
    fn cardinality(&self) -> Option<usize> {
        self.0.cardinality()
    }

    /// The accumulation points removed from the carrier.
    fn excluded(&self) -> Vec<PyTheory> {
        self.0.excluded().into_iter().map(PyTheory).collect()
    }

    fn isolated_points(&self) -> PyResult<Self> {
        self.0.isolated_points().map(PyFamily).map_err(err)
    }

    fn consistent(&self, phi: &PyScheme) -> bool {
        self.0.consistent(&phi.0)
    }

    fn locally_consistent(&self, phi: &PyScheme) -> bool {
        self.0.locally_consistent(&phi.0)
    }

    /// `(rank, degree)`; both are `None` for a nonempty perfect kernel, and the empty family is `(-1, 0)`.
    fn rank(&self) -> (Option<i64>, Option<u64>) {
        rank_tuple(rank::rank(&self.0))
    }

    /// `None` for points of the perfect kernel.
    fn point_rank(&self, t: &Bound<'_, PyAny>) -> PyResult<Option<u32>> {
        Ok(match rank::point_rank(&self.0, &theory(t)?).map_err(err)? {
            cantorfam::PointRank::Finite(r) => Some(r),
            cantorfam::PointRank::Infinite => None,
        })
    }

    fn derivative(&self) -> Self {
        PyFamily(rank::derivative(&self.0))
    }

    fn perfect_kernel(&self) -> Self {
        PyFamily(rank::perfect_kernel(&self.0))
    }

    fn decompose(&self) -> PyResult<Vec<(PySentence, PyFamily)>> {
        Ok(rank::decompose(&self.0).map_err(err)?.into_iter().map(|(s, f)| (PySentence(s), PyFamily(f))).collect())
    }

    fn forces(&self, phi: &Bound<'_, PyAny>, psi: &Bound<'_, PyAny>) -> PyResult<bool> {
        Ok(calculus::forces(&self.0, &sentence(phi)?, &sentence(psi)?))
    }

    fn forces_scheme(&self, phi: &PyScheme, psi: &PyScheme) -> bool {
        calculus::forces_scheme(&self.0, &phi.0, &psi.0)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("<Family {}>", self.0)
    }
}

/// A verified closed family of rank `alpha` and degree `n`, with its report line.
#[pyfunction]
fn build_family(alpha: u32, n: u64) -> PyResult<(String, PyFamily)> {
    let report = build(alpha, n).map_err(err)?;
    let witness = report.witness.clone().expect("finite ranks compile");
    Ok((report.summary(), PyFamily(witness)))
}

/// The recipe for rank `alpha` (an ordinal below w^w such as `"w*2+1"`) as a family file.
#[pyfunction]
fn build_recipe(alpha: &str, n: u64) -> PyResult<String> {
    let alpha: Ordinal = alpha.parse().map_err(err)?;
    Ok(FamilyFile::from_expr(&recipe(&alpha, n).map_err(err)?).to_json())
}

#[pyfunction]
fn nonsdefinable_witness(f: &PyFamily) -> PyResult<(PyTheory, PyScheme)> {
    let (t, phi) = nonsdef(&f.0).map_err(err)?;
    Ok((PyTheory(t), PyScheme(phi)))
}

/// Runs a property suite; one `(name, passed, detail)` per property.
#[pyfunction(name = "check")]
#[pyo3(signature = (suite = "sentences", seed = 0))]
fn run_check(suite: &str, seed: u64) -> PyResult<Vec<(String, bool, String)>> {
    Ok(check::run(suite, seed).map_err(err)?.into_iter().map(|o| (o.name, o.passed, o.detail)).collect())
}

#[pymodule(name = "cantorfam")]
fn cantorfam_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTheory>()?;
    m.add_class::<PySentence>()?;
    m.add_class::<PyScheme>()?;
    m.add_class::<PyFamily>()?;
    m.add_function(wrap_pyfunction!(build_family, m)?)?;
    m.add_function(wrap_pyfunction!(build_recipe, m)?)?;
    m.add_function(wrap_pyfunction!(nonsdefinable_witness, m)?)?;
    m.add_function(wrap_pyfunction!(run_check, m)?)?;
    Ok(())
}

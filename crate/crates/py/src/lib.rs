//! Python bindings for the root-datum / affine Hecke comparison library.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use num_bigint::BigInt as Int;

use hecke_compare::affine::{analyze_facet, build_iwahori_weyl, facet_root_datum};
use hecke_compare::catalog::{self, GroupSpec, ParamTable};
use hecke_compare::compare::{check_adjoint_invariance, compare_hecke_algebras, Verdict};
use hecke_compare::components::{build_dual_component, weakly_unramified_group};
use hecke_compare::hecke::{
    build_from_facet, central_test, multiply, orbit_symmetrize, AffineHeckeDatum, HeckeElement,
};
use hecke_compare::levi::{classify_levis, dual_levi_bijection};

const CAP: usize = 200_000;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn ints(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| Int::from(x)).collect()
}

fn render_elt(e: &HeckeElement) -> String {
    if e.is_zero() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for ((x, w, om), c) in &e.terms {
        let xs: Vec<String> = x.iter().map(|v| v.to_string()).collect();
        let mut t = format!("({c}) theta[{}] N[{w}]", xs.join(","));
        if !om.is_empty() {
            let oms: Vec<String> = om.iter().map(|v| v.to_string()).collect();
            t.push_str(&format!(" omega[{}]", oms.join(",")));
        }
        parts.push(t);
    }
    parts.join(" + ")
}

/// A group given by a based root datum with Galois action and anisotropic
/// kernel marking, loaded from the builtin catalog or a spec file.
#[pyclass]
struct Group {
    spec: GroupSpec,
}

#[pymethods]
impl Group {
    #[new]
    fn new(source: &str) -> PyResult<Self> {
        Ok(Group { spec: catalog::load_group(source).map_err(err)? })
    }

    #[getter]
    fn name(&self) -> String {
        self.spec.name.clone()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.spec.datum.rank
    }

    /// Check the root datum axioms; returns rank, component types and the
    /// finite Weyl group order.
    fn validate<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let rep = self.spec.datum.validate().map_err(err)?;
        self.spec.to_galois().map_err(err)?;
        let d = PyDict::new_bound(py);
        d.set_item("rank", self.spec.datum.rank)?;
        let comps: Vec<String> = rep.components.iter().map(|(t, _)| t.clone()).collect();
        d.set_item("components", comps)?;
        d.set_item("weyl_order", rep.weyl_order.to_string())?;
        Ok(d)
    }

    /// The Langlands dual group spec, rendered in the group file format.
    fn dual(&self) -> String {
        let dual = self.spec.datum.dual();
        let spec = GroupSpec {
            name: format!("dual({})", self.spec.name),
            datum: dual,
            frobenius: self.spec.frobenius.clone(),
            delta0: self.spec.delta0.clone(),
        };
        catalog::group_spec_text(&spec)
    }

    /// Representatives of the Levi classes, as lists of simple positions.
    fn levi_classes(&self) -> PyResult<Vec<Vec<usize>>> {
        let (g, m) = self.spec.to_galois().map_err(err)?;
        let classes = classify_levis(&g, &m, CAP).map_err(err)?;
        Ok(classes.into_iter().map(|c| c.representative).collect())
    }

    /// Number of (primal, dual) Levi class pairs under the duality.
    fn dual_levi_pairs(&self) -> PyResult<usize> {
        let (g, m) = self.spec.to_galois().map_err(err)?;
        Ok(dual_levi_bijection(&g, &m, CAP).map_err(err)?.pairs.len())
    }

    /// Description of the weakly unramified character group.
    fn xwr(&self) -> PyResult<String> {
        let (g, _) = self.spec.to_galois().map_err(err)?;
        Ok(weakly_unramified_group(&g).map_err(err)?.coker.group.describe())
    }

    /// Summary of the Iwahori-Weyl datum: translation group, alcove
    /// stabilizer, affine nodes and wall spacings.
    fn iwahori_weyl<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let (g, m) = self.spec.to_galois().map_err(err)?;
        let iw = build_iwahori_weyl(g, m).map_err(err)?;
        let d = PyDict::new_bound(py);
        d.set_item("translations", iw.lambda.group.describe())?;
        d.set_item("omega", iw.omega.group.describe())?;
        d.set_item("affine_nodes", iw.aff_simple.len())?;
        let gaps: Vec<String> = iw.walls.iter().map(|w| w.gap.to_string()).collect();
        d.set_item("wall_gaps", gaps)?;
        Ok(d)
    }

    /// Analyze the facet given by a set of affine node indices.
    fn facet<'py>(&self, py: Python<'py>, j: Vec<usize>, radius: usize) -> PyResult<Bound<'py, PyDict>> {
        let (g, m) = self.spec.to_galois().map_err(err)?;
        let iw = build_iwahori_weyl(g, m).map_err(err)?;
        let f = analyze_facet(&iw, &j).map_err(err)?;
        let lat = facet_root_datum(&iw, &f, radius).map_err(err)?;
        let d = PyDict::new_bound(py);
        d.set_item("generators", f.s_f_af.len())?;
        d.set_item("stabilizer_generators", f.omega_f_gens.len())?;
        d.set_item("pointwise_classes", f.omega_f_tor.len())?;
        d.set_item("translation_rank", lat.xj_basis.cols)?;
        d.set_item("lattice_rank", lat.xf_basis.len())?;
        let types: Vec<String> = lat
            .rf
            .validate()
            .map_err(err)?
            .components
            .iter()
            .map(|(t, _)| t.clone())
            .collect();
        d.set_item("facet_type", types)?;
        Ok(d)
    }

    /// The affine Hecke algebra of a facet with all exponents 1.
    fn hecke(&self, j: Vec<usize>, radius: usize) -> PyResult<HeckeAlgebra> {
        let (g, m) = self.spec.to_galois().map_err(err)?;
        let iw = build_iwahori_weyl(g, m).map_err(err)?;
        let f = analyze_facet(&iw, &j).map_err(err)?;
        let lat = facet_root_datum(&iw, &f, radius).map_err(err)?;
        let table = ParamTable::default();
        let exps = table
            .exponents(&self.spec.name, &j, "iwahori", f.s_f_af.len())
            .map_err(err)?;
        Ok(HeckeAlgebra { datum: build_from_facet(&iw, &f, &lat, &exps).map_err(err)? })
    }

    /// Run the comparison harness on the Iwahori component of this group:
    /// the facet algebra against the dual-side component algebra.
    fn compare<'py>(&self, py: Python<'py>, radius: usize) -> PyResult<Bound<'py, PyDict>> {
        let padic = self.hecke(vec![], radius)?;
        let (g, m) = self.spec.to_galois().map_err(err)?;
        let dual = build_dual_component(&g, &m, &m.delta0.clone(), "iwahori", None).map_err(err)?;
        let rep = compare_hecke_algebras(&padic.datum, &dual.datum);
        let d = PyDict::new_bound(py);
        match &rep.verdict {
            Verdict::Isomorphic => {
                d.set_item("verdict", "isomorphic")?;
                let v = rep.v_exponent.map(|r| r.to_string());
                d.set_item("v_exponent", v)?;
            }
            Verdict::Mismatch(w) => {
                d.set_item("verdict", "mismatch")?;
                d.set_item("witness", w)?;
            }
        }
        Ok(d)
    }

    /// Compare facet data with the adjoint quotient of the group.
    fn adjoint_check<'py>(
        &self,
        py: Python<'py>,
        j: Vec<usize>,
        radius: usize,
    ) -> PyResult<Bound<'py, PyDict>> {
        let (g, m) = self.spec.to_galois().map_err(err)?;
        let rep = check_adjoint_invariance(&g, &m, &j, radius).map_err(err)?;
        let d = PyDict::new_bound(py);
        d.set_item("passed", rep.passed())?;
        d.set_item("lattice_index", rep.lattice_index.map(|i| i.to_string()))?;
        if let Some(w) = rep.witness {
            d.set_item("witness", w)?;
        }
        Ok(d)
    }
}

/// An affine Hecke algebra in the Bernstein presentation.
#[pyclass]
struct HeckeAlgebra {
    datum: AffineHeckeDatum,
}

#[pymethods]
impl HeckeAlgebra {
    #[getter]
    fn rank(&self) -> usize {
        self.datum.rank()
    }

    #[getter]
    fn labels(&self) -> Vec<(i64, i64)> {
        self.datum
            .lambda
            .iter()
            .zip(&self.datum.lambda_star)
            .map(|(&a, &b)| (a, b))
            .collect()
    }

    #[getter]
    fn omega_invariants(&self) -> Vec<String> {
        self.datum.omega.invariants.iter().map(|d| d.to_string()).collect()
    }

    /// Product theta_x * N_{s_i}, rendered as a string.
    fn theta_times_n(&self, x: Vec<i64>, i: usize) -> PyResult<String> {
        if x.len() != self.datum.rank() {
            return Err(err(format!("expected {} coordinates", self.datum.rank())));
        }
        if i >= self.datum.datum.n_simple() {
            return Err(err(format!("no simple generator {i}")));
        }
        let a = HeckeElement::theta(&self.datum, ints(&x));
        let b = HeckeElement::n_simple(&self.datum, i);
        Ok(render_elt(&multiply(&self.datum, &a, &b).map_err(err)?))
    }

    /// Whether the orbit symmetrization of a lattice point is central.
    fn orbit_is_central(&self, x: Vec<i64>) -> PyResult<bool> {
        if x.len() != self.datum.rank() {
            return Err(err(format!("expected {} coordinates", self.datum.rank())));
        }
        let e = orbit_symmetrize(&self.datum, &ints(&x)).map_err(err)?;
        Ok(central_test(&self.datum, &e).map_err(err)?.central)
    }
}

#[pyfunction]
fn builtin_names() -> Vec<String> {
    catalog::builtin_names().into_iter().map(String::from).collect()
}

#[pymodule]
#[pyo3(name = "hecke_compare")]
fn pymodule_init(_py: Python<'_>, m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Group>()?;
    m.add_class::<HeckeAlgebra>()?;
    m.add_function(wrap_pyfunction!(builtin_names, m)?)?;
    Ok(())
}

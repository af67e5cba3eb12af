use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hecke_compare::affine::{analyze_facet, build_iwahori_weyl, facet_root_datum};
use hecke_compare::catalog::{self, load_group, ParamTable};
use hecke_compare::compare::{check_adjoint_invariance, compare_hecke_algebras, Verdict};
use hecke_compare::components::{
    build_dual_component, match_components, weakly_unramified_group, DualBernsteinComponent,
    PadicComponent,
};
use hecke_compare::hecke::{
    build_from_facet, central_test, multiply, orbit_symmetrize, AffineHeckeDatum, HeckeElement,
};
use hecke_compare::intlin::{int, Int};
use hecke_compare::levi::{classify_levis, dual_galois, dual_levi_bijection};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Parser)]
#[command(name = "hecke-compare", about = "Exact affine Hecke algebra comparisons")]
struct Cli {
    /// group source: builtin:NAME or a spec file path
    #[arg(long, global = true, default_value = "builtin:SL2")]
    group: String,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// enumeration cap for group closures
    #[arg(long, global = true, default_value_t = 200_000)]
    max_elements: usize,
    /// word radius for facet lattice certification
    #[arg(long, global = true, default_value_t = 10)]
    radius: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the root-datum axioms and classify the components
    Validate,
    /// Print the Langlands-dual group spec
    Dual,
    /// List Levi classes up to relative-Weyl association
    LeviClasses,
    /// List the Levi class pairing with the dual side
    DualLevis,
    /// Build the extended affine Weyl group data
    IwahoriWeyl,
    /// Analyze a facet of the fundamental alcove
    Facet {
        #[arg(long = "J", value_delimiter = ',', num_args = 0..)]
        j: Vec<usize>,
    },
    /// Hecke algebra arithmetic over the Iwahori facet datum
    Hecke {
        #[command(subcommand)]
        sub: HeckeCmd,
    },
    /// The weakly unramified character group
    Xwr,
    /// Enumerate and match components on both sides
    Components,
    /// Compare the facet Hecke datum with its dual component
    Compare {
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        facet: Vec<usize>,
        #[arg(long, default_value = "iwahori")]
        cuspidal: String,
        /// parameter table file
        #[arg(long)]
        table: Option<String>,
    },
    /// Compare facet data with the adjoint quotient
    AdjointCheck {
        #[arg(long = "J", value_delimiter = ',', num_args = 0..)]
        j: Vec<usize>,
    },
}

#[derive(Subcommand)]
enum HeckeCmd {
    /// Multiply two elements (syntax: one | N:<i> | theta:<coords> | orbit:<coords>)
    Mult { a: String, b: String },
    /// Test centrality of an element
    CenterCheck { e: String },
}

fn parse_elt(d: &AffineHeckeDatum, s: &str) -> Result<HeckeElement, String> {
    if s == "one" {
        return Ok(HeckeElement::one(d));
    }
    let (kind, rest) = s.split_once(':').ok_or_else(|| format!("bad element {s}"))?;
    match kind {
        "N" => {
            let i: usize = rest.parse().map_err(|_| format!("bad index {rest}"))?;
            if i >= d.datum.n_simple() {
                return Err(format!("no simple generator {i}"));
            }
            Ok(HeckeElement::n_simple(d, i))
        }
        "theta" | "orbit" => {
            let x: Vec<Int> = rest
                .split(',')
                .map(|p| p.trim().parse::<i64>().map(int).map_err(|_| format!("bad coord {p}")))
                .collect::<Result<_, _>>()?;
            if x.len() != d.rank() {
                return Err(format!("expected {} coordinates", d.rank()));
            }
            if kind == "theta" {
                Ok(HeckeElement::theta(d, x))
            } else {
                orbit_symmetrize(d, &x).map_err(|e| e.to_string())
            }
        }
        _ => Err(format!("unknown element kind {kind}")),
    }
}

fn render_elt(e: &HeckeElement) -> String {
    if e.is_zero() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for ((x, w, om), c) in &e.terms {
        let xs: Vec<String> = x.iter().map(|v| v.to_string()).collect();
        let oms: Vec<String> = om.iter().map(|v| v.to_string()).collect();
        let mut t = format!("({c}) theta[{}] N[{w}]", xs.join(","));
        if !om.is_empty() {
            t.push_str(&format!(" omega[{}]", oms.join(",")));
        }
        parts.push(t);
    }
    parts.join(" + ")
}

struct Out {
    format: Format,
}

impl Out {
    fn emit(&self, text: String, value: Value) {
        match self.format {
            Format::Text => println!("{text}"),
            Format::Json => println!("{}", serde_json::to_string_pretty(&value).unwrap()),
        }
    }
}

fn iwahori_padic(
    spec: &catalog::GroupSpec,
    j: &[usize],
    cuspidal: &str,
    table: &ParamTable,
    radius: usize,
) -> Result<AffineHeckeDatum, String> {
    let (g, m) = spec.to_galois().map_err(|e| e.to_string())?;
    let iw = build_iwahori_weyl(g, m).map_err(|e| e.to_string())?;
    let f = analyze_facet(&iw, j).map_err(|e| e.to_string())?;
    let lat = facet_root_datum(&iw, &f, radius).map_err(|e| e.to_string())?;
    let exps = table
        .exponents(&spec.name, j, cuspidal, f.s_f_af.len())
        .map_err(|e| e.to_string())?;
    build_from_facet(&iw, &f, &lat, &exps).map_err(|e| e.to_string())
}

fn run(cli: Cli) -> Result<u8, String> {
    let out = Out { format: cli.format };
    let spec = load_group(&cli.group).map_err(|e| e.to_string())?;
    match cli.cmd {
        Cmd::Validate => {
            let report = match spec.datum.validate() {
                Ok(r) => r,
                Err(e) => {
                    out.emit(
                        format!("invalid: {e}"),
                        json!({"ok": false, "witness": e.to_string()}),
                    );
                    return Ok(1);
                }
            };
            let comps: Vec<String> = report.components.iter().map(|(t, _)| t.clone()).collect();
            if let Err(e) = spec.to_galois() {
                out.emit(
                    format!("invalid galois data: {e}"),
                    json!({"ok": false, "witness": e.to_string()}),
                );
                return Ok(1);
            }
            out.emit(
                format!(
                    "ok: rank {}, components [{}], Weyl order {}",
                    spec.datum.rank,
                    comps.join(", "),
                    report.weyl_order
                ),
                json!({"ok": true, "rank": spec.datum.rank, "components": comps,
                       "weyl_order": report.weyl_order}),
            );
            Ok(0)
        }
        Cmd::Dual => {
            let (g, _) = spec.to_galois().map_err(|e| e.to_string())?;
            let gd = dual_galois(&g).map_err(|e| e.to_string())?;
            let dual_spec = catalog::GroupSpec {
                name: format!("dual({})", spec.name),
                datum: gd.base.clone(),
                frobenius: gd.generators.first().cloned(),
                delta0: spec.delta0.clone(),
            };
            let text = catalog::group_spec_text(&dual_spec);
            out.emit(text.clone(), json!({"spec": text}));
            Ok(0)
        }
        Cmd::LeviClasses => {
            let (g, m) = spec.to_galois().map_err(|e| e.to_string())?;
            let classes = classify_levis(&g, &m, cli.max_elements).map_err(|e| e.to_string())?;
            let mut lines = Vec::new();
            let mut vals = Vec::new();
            for c in &classes {
                lines.push(format!("{:?} ({} members)", c.representative, c.members.len()));
                vals.push(json!({"representative": c.representative,
                                 "members": c.members.len()}));
            }
            out.emit(
                format!("{} classes\n{}", classes.len(), lines.join("\n")),
                json!({"count": classes.len(), "classes": vals}),
            );
            Ok(0)
        }
        Cmd::DualLevis => {
            let (g, m) = spec.to_galois().map_err(|e| e.to_string())?;
            let b = dual_levi_bijection(&g, &m, cli.max_elements).map_err(|e| e.to_string())?;
            let mut lines = Vec::new();
            let mut vals = Vec::new();
            for (p, d) in &b.pairs {
                lines.push(format!("{:?} <-> {:?}", p.representative, d.representative));
                vals.push(json!({"levi": p.representative, "dual": d.representative}));
            }
            out.emit(
                format!("{} pairs\n{}", b.pairs.len(), lines.join("\n")),
                json!({"count": b.pairs.len(), "pairs": vals}),
            );
            Ok(0)
        }
        Cmd::IwahoriWeyl => {
            let (g, m) = spec.to_galois().map_err(|e| e.to_string())?;
            let iw = build_iwahori_weyl(g, m).map_err(|e| e.to_string())?;
            let gaps: Vec<String> = iw.walls.iter().map(|w| w.gap.to_string()).collect();
            out.emit(
                format!(
                    "translations: {}\nomega: {}\naffine nodes: {}\nwall gaps: [{}]",
                    iw.lambda.group.describe(),
                    iw.omega.group.describe(),
                    iw.aff_simple.len(),
                    gaps.join(", ")
                ),
                json!({"translations": iw.lambda.group.describe(),
                       "omega": iw.omega.group.describe(),
                       "affine_nodes": iw.aff_simple.len(),
                       "wall_gaps": gaps}),
            );
            Ok(0)
        }
        Cmd::Facet { j } => {
            let (g, m) = spec.to_galois().map_err(|e| e.to_string())?;
            let iw = build_iwahori_weyl(g, m).map_err(|e| e.to_string())?;
            let f = analyze_facet(&iw, &j).map_err(|e| e.to_string())?;
            let lat = facet_root_datum(&iw, &f, cli.radius).map_err(|e| e.to_string())?;
            let types: Vec<String> = lat
                .rf
                .validate()
                .map_err(|e| e.to_string())?
                .components
                .iter()
                .map(|(t, _)| t.clone())
                .collect();
            out.emit(
                format!(
                    "J = {:?}\ngenerators: {}\nstabilizer generators: {}\npointwise classes: {}\n\
                     translation rank: {}\nlattice rank: {}\nfacet type: [{}]",
                    f.j,
                    f.s_f_af.len(),
                    f.omega_f_gens.len(),
                    f.omega_f_tor.len(),
                    lat.xj_basis.cols,
                    lat.xf_basis.len(),
                    types.join(", ")
                ),
                json!({"J": f.j, "generators": f.s_f_af.len(),
                       "stabilizer_generators": f.omega_f_gens.len(),
                       "pointwise_classes": f.omega_f_tor.len(),
                       "translation_rank": lat.xj_basis.cols,
                       "lattice_rank": lat.xf_basis.len(),
                       "type": types}),
            );
            Ok(0)
        }
        Cmd::Hecke { sub } => {
            let table = ParamTable::default();
            let d = iwahori_padic(&spec, &[], "iwahori", &table, cli.radius)?;
            match sub {
                HeckeCmd::Mult { a, b } => {
                    let ea = parse_elt(&d, &a)?;
                    let eb = parse_elt(&d, &b)?;
                    let p = multiply(&d, &ea, &eb).map_err(|e| e.to_string())?;
                    let text = render_elt(&p);
                    out.emit(text.clone(), json!({"product": text}));
                    Ok(0)
                }
                HeckeCmd::CenterCheck { e } => {
                    let ee = parse_elt(&d, &e)?;
                    let rep = central_test(&d, &ee).map_err(|e| e.to_string())?;
                    match rep.witness {
                        None => {
                            out.emit("central".into(), json!({"central": true}));
                            Ok(0)
                        }
                        Some((label, comm)) => {
                            let text = format!(
                                "not central: [e, {label}] = {}",
                                render_elt(&comm)
                            );
                            out.emit(
                                text.clone(),
                                json!({"central": false, "witness": label,
                                       "commutator": render_elt(&comm)}),
                            );
                            Ok(1)
                        }
                    }
                }
            }
        }
        Cmd::Xwr => {
            let (g, _) = spec.to_galois().map_err(|e| e.to_string())?;
            let x = weakly_unramified_group(&g).map_err(|e| e.to_string())?;
            let order = x
                .order()
                .map(|o| o.to_string())
                .unwrap_or_else(|| "infinite".into());
            out.emit(
                format!("X_wr = {} (order {order})", x.coker.group.describe()),
                json!({"group": x.coker.group.describe(), "order": order}),
            );
            Ok(0)
        }
        Cmd::Components => {
            let (g, m) = spec.to_galois().map_err(|e| e.to_string())?;
            let table = ParamTable::default();
            let full: Vec<usize> = (0..g.base.n_simple()).collect();
            let padic = vec![
                PadicComponent {
                    j: vec![],
                    cuspidal_id: "iwahori".into(),
                    datum: iwahori_padic(&spec, &[], "iwahori", &table, cli.radius)?,
                },
                PadicComponent {
                    j: vec![],
                    cuspidal_id: format!("cusp-{}", spec.name),
                    datum: build_dual_component(&g, &m, &full, "pad", None)
                        .map_err(|e| e.to_string())?
                        .datum,
                },
            ];
            let galois = vec![
                build_dual_component(&g, &m, &m.delta0.clone(), "iwahori", None)
                    .map_err(|e| e.to_string())?,
                build_dual_component(&g, &m, &full, &format!("cusp-{}", spec.name), None)
                    .map_err(|e| e.to_string())?,
            ];
            let matches = match_components(&padic, &galois).map_err(|e| e.to_string())?;
            let mut lines = Vec::new();
            let mut vals = Vec::new();
            let mut ok = true;
            for mm in &matches {
                let verdict = match &mm.report.verdict {
                    Verdict::Isomorphic => "isomorphic".to_string(),
                    Verdict::Mismatch(w) => {
                        ok = false;
                        format!("mismatch: {w}")
                    }
                };
                lines.push(format!(
                    "{} <-> {}: {verdict}",
                    padic[mm.padic].cuspidal_id, galois[mm.galois].cuspidal_id
                ));
                vals.push(json!({"padic": padic[mm.padic].cuspidal_id,
                                 "galois": galois[mm.galois].cuspidal_id,
                                 "verdict": verdict}));
            }
            out.emit(
                format!("{} matches\n{}", matches.len(), lines.join("\n")),
                json!({"count": matches.len(), "matches": vals}),
            );
            Ok(if ok { 0 } else { 1 })
        }
        Cmd::Compare { facet, cuspidal, table } => {
            let table = match table {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| format!("cannot read {path}: {e}"))?;
                    catalog::parse_param_table(&text).map_err(|e| e.to_string())?
                }
                None => ParamTable::default(),
            };
            let padic = iwahori_padic(&spec, &facet, &cuspidal, &table, cli.radius)?;
            let (g, m) = spec.to_galois().map_err(|e| e.to_string())?;
            let dual: DualBernsteinComponent =
                build_dual_component(&g, &m, &m.delta0.clone(), &cuspidal, None)
                    .map_err(|e| e.to_string())?;
            let report = compare_hecke_algebras(&padic, &dual.datum);
            match &report.verdict {
                Verdict::Isomorphic => {
                    let v = report
                        .v_exponent
                        .as_ref()
                        .map(|r| r.to_string())
                        .unwrap_or_else(|| "unconstrained".into());
                    out.emit(
                        format!("isomorphic (v-exponent {v})"),
                        json!({"verdict": "isomorphic", "v_exponent": v}),
                    );
                    Ok(0)
                }
                Verdict::Mismatch(w) => {
                    out.emit(
                        format!("mismatch: {w}"),
                        json!({"verdict": "mismatch", "witness": w}),
                    );
                    Ok(1)
                }
            }
        }
        Cmd::AdjointCheck { j } => {
            let (g, m) = spec.to_galois().map_err(|e| e.to_string())?;
            let rep = check_adjoint_invariance(&g, &m, &j, cli.radius)
                .map_err(|e| e.to_string())?;
            let index = rep
                .lattice_index
                .as_ref()
                .map(|i| i.to_string())
                .unwrap_or_else(|| "undefined".into());
            if rep.passed() {
                out.emit(
                    format!("adjoint data agree; lattice index {index}"),
                    json!({"ok": true, "lattice_index": index}),
                );
                Ok(0)
            } else {
                let w = rep.witness.unwrap_or_else(|| "unknown".into());
                out.emit(
                    format!("adjoint data differ: {w}"),
                    json!({"ok": false, "witness": w, "lattice_index": index}),
                );
                Ok(1)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

//! Built-in group catalog and the plain-text file formats: group
//! specifications, facet parameter tables, and component catalogs.

use std::collections::HashMap;

use thiserror::Error;

use crate::galois::{AnisotropicMarking, GaloisDatum, GaloisError};
use crate::intlin::{int, Int, IntMat};
use crate::rootdata::BasedRootDatum;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Galois(#[from] GaloisError),
    #[error("unknown builtin group {0}")]
    Unknown(String),
}

#[derive(Clone, Debug)]
pub struct GroupSpec {
    pub name: String,
    pub datum: BasedRootDatum,
    pub frobenius: Option<IntMat>,
    pub delta0: Vec<usize>,
}

impl GroupSpec {
    pub fn to_galois(&self) -> Result<(GaloisDatum, AnisotropicMarking), CatalogError> {
        let gens = match &self.frobenius {
            Some(f) if !f.is_identity() => vec![f.clone()],
            _ => vec![],
        };
        let g = GaloisDatum::new(self.datum.clone(), gens)?;
        let m = AnisotropicMarking::new(&g, self.delta0.clone())?;
        Ok((g, m))
    }
}

fn ivec(parts: &[&str]) -> Result<Vec<Int>, CatalogError> {
    parts
        .iter()
        .map(|p| {
            p.parse::<i64>()
                .map(int)
                .map_err(|_| CatalogError::Parse(format!("bad integer {p}")))
        })
        .collect()
}

/// Group spec format, one field per line, order-insensitive, `#` comments:
///   name <string>
///   rank <n>
///   simple <root coords> / <coroot coords>     (repeated)
///   frobenius <n*n entries, row-major>          (optional)
///   delta0 <simple positions>                   (optional)
pub fn parse_group_spec(text: &str) -> Result<GroupSpec, CatalogError> {
    let mut name = None;
    let mut rank = None;
    let mut simples: Vec<(Vec<Int>, Vec<Int>)> = Vec::new();
    let mut frob: Option<Vec<Int>> = None;
    let mut delta0 = Vec::new();
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let parts: Vec<&str> = rest.split_whitespace().collect();
        match key {
            "name" => name = Some(rest.trim().to_string()),
            "rank" => {
                rank = Some(rest.trim().parse::<usize>().map_err(|_| {
                    CatalogError::Parse(format!("bad rank {rest}"))
                })?)
            }
            "simple" => {
                let halves: Vec<&str> = rest.split('/').collect();
                if halves.len() != 2 {
                    return Err(CatalogError::Parse(
                        "simple line needs `root / coroot`".into(),
                    ));
                }
                let r = ivec(&halves[0].split_whitespace().collect::<Vec<_>>())?;
                let c = ivec(&halves[1].split_whitespace().collect::<Vec<_>>())?;
                simples.push((r, c));
            }
            "frobenius" => frob = Some(ivec(&parts)?),
            "delta0" => {
                delta0 = parts
                    .iter()
                    .map(|p| {
                        p.parse::<usize>()
                            .map_err(|_| CatalogError::Parse(format!("bad index {p}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?
            }
            other => {
                return Err(CatalogError::Parse(format!("unknown field {other}")));
            }
        }
    }
    let name = name.ok_or_else(|| CatalogError::Parse("missing name".into()))?;
    let rank = rank.ok_or_else(|| CatalogError::Parse("missing rank".into()))?;
    for (r, c) in &simples {
        if r.len() != rank || c.len() != rank {
            return Err(CatalogError::Parse("coordinate length differs from rank".into()));
        }
    }
    let datum = if simples.is_empty() {
        BasedRootDatum::torus(rank, Some(name.clone()))
    } else {
        BasedRootDatum::generate(rank, simples, Some(name.clone()))
    };
    let frobenius = match frob {
        None => None,
        Some(entries) => {
            if entries.len() != rank * rank {
                return Err(CatalogError::Parse("frobenius needs rank^2 entries".into()));
            }
            let mut m = IntMat::zeros(rank, rank);
            for i in 0..rank {
                for j in 0..rank {
                    *m.at_mut(i, j) = entries[i * rank + j].clone();
                }
            }
            Some(m)
        }
    };
    Ok(GroupSpec { name, datum, frobenius, delta0 })
}

pub fn group_spec_text(s: &GroupSpec) -> String {
    let mut out = String::new();
    out.push_str(&format!("name {}\n", s.name));
    out.push_str(&format!("rank {}\n", s.datum.rank));
    for i in 0..s.datum.n_simple() {
        let r: Vec<String> = s.datum.simple_root(i).iter().map(|x| x.to_string()).collect();
        let c: Vec<String> = s.datum.simple_coroot(i).iter().map(|x| x.to_string()).collect();
        out.push_str(&format!("simple {} / {}\n", r.join(" "), c.join(" ")));
    }
    if let Some(f) = &s.frobenius {
        let mut entries = Vec::new();
        for i in 0..f.rows {
            for j in 0..f.cols {
                entries.push(f.at(i, j).to_string());
            }
        }
        out.push_str(&format!("frobenius {}\n", entries.join(" ")));
    }
    if !s.delta0.is_empty() {
        let d: Vec<String> = s.delta0.iter().map(|x| x.to_string()).collect();
        out.push_str(&format!("delta0 {}\n", d.join(" ")));
    }
    out
}

/// Facet parameter tables: per (group, facet J, cuspidal id), one exponent
/// per affine-diagram position of the facet group.
///
///   facet <group> J=<comma list or -> cuspidal=<id>
///   node <position> <exponent>                        (repeated)
#[derive(Clone, Debug, Default)]
pub struct ParamTable {
    pub entries: HashMap<(String, Vec<usize>, String), HashMap<usize, i64>>,
}

impl ParamTable {
    pub fn exponents(
        &self,
        group: &str,
        j: &[usize],
        cuspidal: &str,
        count: usize,
    ) -> Result<Vec<i64>, CatalogError> {
        if cuspidal == "iwahori" && !self.entries.contains_key(&(
            group.to_string(),
            j.to_vec(),
            cuspidal.to_string(),
        )) {
            return Ok(vec![1; count]);
        }
        let e = self
            .entries
            .get(&(group.to_string(), j.to_vec(), cuspidal.to_string()))
            .ok_or_else(|| {
                CatalogError::Parse(format!(
                    "no table entry for {group} J={j:?} cuspidal={cuspidal}"
                ))
            })?;
        (0..count)
            .map(|i| {
                e.get(&i).copied().ok_or_else(|| {
                    CatalogError::Parse(format!("missing exponent for node {i}"))
                })
            })
            .collect()
    }
}

pub fn parse_param_table(text: &str) -> Result<ParamTable, CatalogError> {
    let mut table = ParamTable::default();
    let mut current: Option<(String, Vec<usize>, String)> = None;
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts[0] {
            "facet" => {
                let mut group = None;
                let mut j = Vec::new();
                let mut cusp = None;
                for p in &parts[1..] {
                    if let Some(v) = p.strip_prefix("J=") {
                        if v != "-" && !v.is_empty() {
                            j = v
                                .split(',')
                                .map(|x| {
                                    x.parse::<usize>().map_err(|_| {
                                        CatalogError::Parse(format!("bad J index {x}"))
                                    })
                                })
                                .collect::<Result<Vec<_>, _>>()?;
                        }
                    } else if let Some(v) = p.strip_prefix("cuspidal=") {
                        cusp = Some(v.to_string());
                    } else {
                        group = Some(p.to_string());
                    }
                }
                let key = (
                    group.ok_or_else(|| CatalogError::Parse("facet line without group".into()))?,
                    j,
                    cusp.ok_or_else(|| CatalogError::Parse("facet line without cuspidal".into()))?,
                );
                table.entries.entry(key.clone()).or_default();
                current = Some(key);
            }
            "node" => {
                let key = current
                    .clone()
                    .ok_or_else(|| CatalogError::Parse("node line before facet line".into()))?;
                if parts.len() != 3 {
                    return Err(CatalogError::Parse("node line needs position and exponent".into()));
                }
                let pos: usize = parts[1]
                    .parse()
                    .map_err(|_| CatalogError::Parse(format!("bad node {}", parts[1])))?;
                let e: i64 = parts[2]
                    .parse()
                    .map_err(|_| CatalogError::Parse(format!("bad exponent {}", parts[2])))?;
                table.entries.get_mut(&key).unwrap().insert(pos, e);
            }
            other => return Err(CatalogError::Parse(format!("unknown line {other}"))),
        }
    }
    Ok(table)
}

/// Component catalogs: declared cuspidal data per group and side.
///
///   component <group> side=<padic|galois> levi=<comma list or -> cuspidal=<id>
#[derive(Clone, Debug, Default)]
pub struct ComponentCatalog {
    /// (group, side) -> list of (levi subset, cuspidal id)
    pub entries: HashMap<(String, String), Vec<(Vec<usize>, String)>>,
}

pub fn parse_component_catalog(text: &str) -> Result<ComponentCatalog, CatalogError> {
    let mut cat = ComponentCatalog::default();
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts[0] != "component" {
            return Err(CatalogError::Parse(format!("unknown line {}", parts[0])));
        }
        let mut group = None;
        let mut side = None;
        let mut levi = Vec::new();
        let mut cusp = None;
        for p in &parts[1..] {
            if let Some(v) = p.strip_prefix("side=") {
                side = Some(v.to_string());
            } else if let Some(v) = p.strip_prefix("levi=") {
                if v != "-" && !v.is_empty() {
                    levi = v
                        .split(',')
                        .map(|x| {
                            x.parse::<usize>()
                                .map_err(|_| CatalogError::Parse(format!("bad index {x}")))
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                }
            } else if let Some(v) = p.strip_prefix("cuspidal=") {
                cusp = Some(v.to_string());
            } else {
                group = Some(p.to_string());
            }
        }
        let g = group.ok_or_else(|| CatalogError::Parse("component line without group".into()))?;
        let s = side.ok_or_else(|| CatalogError::Parse("component line without side".into()))?;
        let c = cusp.ok_or_else(|| CatalogError::Parse("component line without id".into()))?;
        cat.entries.entry((g, s)).or_default().push((levi, c));
    }
    Ok(cat)
}

fn spec(name: &str, rank: usize, simples: Vec<(Vec<i64>, Vec<i64>)>) -> GroupSpec {
    let pairs = simples
        .into_iter()
        .map(|(r, c)| {
            (
                r.into_iter().map(int).collect::<Vec<Int>>(),
                c.into_iter().map(int).collect::<Vec<Int>>(),
            )
        })
        .collect();
    GroupSpec {
        name: name.to_string(),
        datum: BasedRootDatum::generate(rank, pairs, Some(name.to_string())),
        frobenius: None,
        delta0: vec![],
    }
}

pub fn builtin_names() -> Vec<&'static str> {
    vec![
        "SL2", "PGL2", "SL3", "PGL3", "Sp4", "SO5", "GL2", "G2", "SU3", "SU4", "INNER",
    ]
}

pub fn builtin(name: &str) -> Result<GroupSpec, CatalogError> {
    let s = match name {
        "SL2" => spec("SL2", 1, vec![(vec![2], vec![1])]),
        "PGL2" => spec("PGL2", 1, vec![(vec![1], vec![2])]),
        // weight-lattice coordinates
        "SL3" => spec(
            "SL3",
            2,
            vec![(vec![2, -1], vec![1, 0]), (vec![-1, 2], vec![0, 1])],
        ),
        // root-lattice coordinates
        "PGL3" => spec(
            "PGL3",
            2,
            vec![(vec![1, 0], vec![2, -1]), (vec![0, 1], vec![-1, 2])],
        ),
        // standard coordinates e1, e2 on the diagonal torus
        "Sp4" => spec(
            "Sp4",
            2,
            vec![(vec![1, -1], vec![1, -1]), (vec![0, 2], vec![0, 1])],
        ),
        "SO5" => spec(
            "SO5",
            2,
            vec![(vec![1, -1], vec![1, -1]), (vec![0, 1], vec![0, 2])],
        ),
        // rank-3 lattice with a central line
        "GL2" => spec("GL2", 3, vec![(vec![1, -1, 0], vec![1, -1, 0])]),
        "G2" => spec(
            "G2",
            2,
            vec![(vec![1, 0], vec![2, -3]), (vec![0, 1], vec![-1, 2])],
        ),
        "SU3" => {
            let mut s = spec(
                "SU3",
                2,
                vec![(vec![2, -1], vec![1, 0]), (vec![-1, 2], vec![0, 1])],
            );
            s.frobenius = Some(IntMat::from_i64(2, 2, &[0, 1, 1, 0]));
            s
        }
        "SU4" => {
            let mut s = spec(
                "SU4",
                3,
                vec![
                    (vec![2, -1, 0], vec![1, 0, 0]),
                    (vec![-1, 2, -1], vec![0, 1, 0]),
                    (vec![0, -1, 2], vec![0, 0, 1]),
                ],
            );
            s.frobenius = Some(IntMat::from_i64(3, 3, &[0, 0, 1, 0, 1, 0, 1, 0, 0]));
            s
        }
        // anisotropic inner form: the whole simple system is marked
        "INNER" => {
            let mut s = spec("INNER", 1, vec![(vec![2], vec![1])]);
            s.delta0 = vec![0];
            s
        }
        other => return Err(CatalogError::Unknown(other.to_string())),
    };
    Ok(s)
}

/// Load `builtin:NAME` or a group spec file.
pub fn load_group(arg: &str) -> Result<GroupSpec, CatalogError> {
    if let Some(name) = arg.strip_prefix("builtin:") {
        builtin(name)
    } else {
        let text = std::fs::read_to_string(arg)
            .map_err(|e| CatalogError::Parse(format!("cannot read {arg}: {e}")))?;
        parse_group_spec(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_validate() {
        for name in builtin_names() {
            let s = builtin(name).unwrap();
            s.datum.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
            let (g, m) = s.to_galois().unwrap_or_else(|e| panic!("{name}: {e}"));
            let _ = crate::galois::restricted_root_system(&g, &m)
                .unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn group_spec_roundtrip() {
        for name in builtin_names() {
            let s = builtin(name).unwrap();
            let text = group_spec_text(&s);
            let back = parse_group_spec(&text).unwrap();
            assert_eq!(back.name, s.name);
            assert_eq!(back.datum.roots, s.datum.roots);
            assert_eq!(back.datum.coroots, s.datum.coroots);
            assert_eq!(back.frobenius, s.frobenius);
            assert_eq!(back.delta0, s.delta0);
        }
    }

    #[test]
    fn param_table_parses() {
        let text = "
# unequal parameters on the SL2 alcove
facet SL2 J=- cuspidal=odd
node 0 1
node 1 3
";
        let t = parse_param_table(text).unwrap();
        assert_eq!(t.exponents("SL2", &[], "odd", 2).unwrap(), vec![1, 3]);
        assert_eq!(t.exponents("SL2", &[], "iwahori", 2).unwrap(), vec![1, 1]);
        assert!(t.exponents("SL2", &[], "missing", 2).is_err());
    }

    #[test]
    fn component_catalog_parses() {
        let text = "
component SL2 side=padic levi=- cuspidal=iwahori
component SL2 side=padic levi=0 cuspidal=stp
component SL2 side=galois levi=- cuspidal=iwahori
component SL2 side=galois levi=0 cuspidal=stp
";
        let c = parse_component_catalog(text).unwrap();
        assert_eq!(c.entries[&("SL2".to_string(), "padic".to_string())].len(), 2);
        assert_eq!(
            c.entries[&("SL2".to_string(), "galois".to_string())][1],
            (vec![0], "stp".to_string())
        );
    }
}

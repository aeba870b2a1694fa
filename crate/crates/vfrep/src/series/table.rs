//! Counting tables and their renderers.

use std::fmt::Write as _;

use num_rational::BigRational;
use serde_json::{json, Value};

use super::Counts;
use crate::dimmonoid::DimVector;
use crate::exactalg::Poly;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Absim,
    Ss,
    Sim,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Absim => "absim",
            Kind::Ss => "ss",
            Kind::Sim => "sim",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "absim" => Some(Kind::Absim),
            "ss" => Some(Kind::Ss),
            "sim" => Some(Kind::Sim),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableEntry {
    pub dimvector: DimVector,
    pub poly: Poly,
    /// For `sim` tables: `R^sim_{m,c}` for each `c | m`.
    pub by_divisor: Vec<(u32, Poly)>,
}

/// Per-dimension-vector polynomials of one kind, `1 <= |m| <= max_dim`, plus
/// the per-total-dimension sums. The trivial entry at `m = 0` is omitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountingTable {
    pub group: String,
    pub max_dim: u32,
    pub kind: Kind,
    pub entries: Vec<TableEntry>,
    pub totals: Vec<(u32, Poly)>,
}

impl CountingTable {
    pub fn from_counts(group: &str, counts: &Counts, kind: Kind) -> Self {
        let index = &counts.index;
        let mut entries = Vec::new();
        let mut totals = Vec::new();
        for d in 1..=index.max_dim() {
            let mut total = Poly::zero();
            for i in index.range(d) {
                let (poly, by_divisor) = match kind {
                    Kind::Absim => (counts.absim[i].clone(), Vec::new()),
                    Kind::Ss => (counts.ss[i].clone(), Vec::new()),
                    Kind::Sim => {
                        let (parts, t) = counts.sim(i);
                        (t, parts)
                    }
                };
                total = &total + &poly;
                entries.push(TableEntry {
                    dimvector: index.elem(i).clone(),
                    poly,
                    by_divisor,
                });
            }
            totals.push((d, total));
        }
        Self {
            group: group.to_string(),
            max_dim: index.max_dim(),
            kind,
            entries,
            totals,
        }
    }

    pub fn to_json(&self) -> Value {
        let poly_json = |p: &Poly| json!(p.coeff_strings());
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|e| {
                let mut v = json!({
                    "dimvector": e.dimvector.to_string(),
                    "coefficients": poly_json(&e.poly),
                    "polynomial": e.poly.to_text(),
                });
                if self.kind == Kind::Sim {
                    v["by_divisor"] = e
                        .by_divisor
                        .iter()
                        .map(|(c, p)| json!({"c": c, "coefficients": poly_json(p)}))
                        .collect();
                }
                v
            })
            .collect();
        let totals: Vec<Value> = self
            .totals
            .iter()
            .map(|(d, p)| json!({"d": d, "coefficients": poly_json(p), "polynomial": p.to_text()}))
            .collect();
        json!({
            "group": self.group,
            "max_dim": self.max_dim,
            "kind": self.kind.name(),
            "entries": entries,
            "totals": totals,
        })
    }

    /// Per-dimension-vector rows as `(dimvector, polynomial)`; dimension
    /// vectors stay textual since no graph is attached to the JSON.
    pub fn parse_json(v: &Value) -> Option<ParsedTable> {
        let obj = v.as_object()?;
        let polys = |x: &Value| -> Option<Poly> {
            let items: Vec<String> = x
                .as_array()?
                .iter()
                .map(|c| c.as_str().map(str::to_string))
                .collect::<Option<_>>()?;
            Poly::from_coeff_strings(&items).ok()
        };
        let entries = obj
            .get("entries")?
            .as_array()?
            .iter()
            .map(|e| Some((e.get("dimvector")?.as_str()?.to_string(), polys(e.get("coefficients")?)?)))
            .collect::<Option<Vec<_>>>()?;
        let totals = obj
            .get("totals")?
            .as_array()?
            .iter()
            .map(|e| Some((e.get("d")?.as_u64()? as u32, polys(e.get("coefficients")?)?)))
            .collect::<Option<Vec<_>>>()?;
        Some(ParsedTable {
            group: obj.get("group")?.as_str()?.to_string(),
            max_dim: obj.get("max_dim")?.as_u64()? as u32,
            kind: Kind::parse(obj.get("kind")?.as_str()?)?,
            entries,
            totals,
        })
    }

    pub fn render_text(&self, by_total: bool) -> String {
        let mut out = String::new();
        for (label, p) in self.rows(by_total) {
            writeln!(out, "{label}: {}", p.to_text()).unwrap();
        }
        out
    }

    pub fn render_csv(&self, by_total: bool) -> String {
        let mut out = String::from(if by_total { "d,polynomial\n" } else { "dimvector,polynomial\n" });
        for (label, p) in self.rows(by_total) {
            writeln!(out, "\"{label}\",{}", p.to_text()).unwrap();
        }
        out
    }

    pub fn render_latex(&self, by_total: bool) -> String {
        let head = if by_total { "$d$" } else { "$m$" };
        let mut out = format!("\\begin{{tabular}}{{|c|c|}}\n\\hline\n{head} & ${}$\n\\\\\\hline\n", self.symbol(by_total));
        for (label, p) in self.rows(by_total) {
            writeln!(out, "${label}$ & ${}$\n\\\\\\hline", p.to_latex()).unwrap();
        }
        out.push_str("\\end{tabular}\n");
        out
    }

    fn symbol(&self, by_total: bool) -> String {
        let sub = if by_total { "d" } else { "m" };
        format!("R^{{\\mathrm{{{}}}}}_{{{sub}}}", self.kind.name())
    }

    fn rows(&self, by_total: bool) -> Vec<(String, &Poly)> {
        if by_total {
            self.totals.iter().map(|(d, p)| (d.to_string(), p)).collect()
        } else {
            self.entries
                .iter()
                .map(|e| (e.dimvector.to_string(), &e.poly))
                .collect()
        }
    }
}

/// JSON table read back without a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedTable {
    pub group: String,
    pub max_dim: u32,
    pub kind: Kind,
    pub entries: Vec<(String, Poly)>,
    pub totals: Vec<(u32, Poly)>,
}

/// One row of E-polynomial output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpolyRow {
    pub label: String,
    pub epoly: String,
    pub euler: BigRational,
}

/// E-polynomials (`s -> xy`) and Euler characteristics (value at 1) of a
/// table's per-total-dimension rows, or per-vector rows if `by_total` is
/// false.
pub fn epoly_and_euler(table: &CountingTable, by_total: bool) -> Vec<EpolyRow> {
    table
        .rows(by_total)
        .into_iter()
        .map(|(label, p)| EpolyRow {
            label,
            epoly: p.to_epoly_text(),
            euler: p.eval_int(1),
        })
        .collect()
}

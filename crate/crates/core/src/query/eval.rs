use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};

use serde_json::{json, Value};

use super::parser::{CompareOp, Filter, PatternTerm, QueryAst};
use crate::kgmodel::Term;
use crate::store::{Store, TermId};

pub type BindingRow = BTreeMap<String, Term>;

#[derive(Debug, Clone, PartialEq)]
pub struct QueryResult {
    pub vars: Vec<String>,
    pub rows: Vec<BindingRow>,
}

impl QueryResult {
    /// `{"head": {"vars": [...]}, "rows": [[term, ...], ...]}` with terms
    /// in N-Triples notation and `null` for unbound cells.
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(self.vars.iter().map(|v| r.get(v).map_or(Value::Null, |t| json!(t.to_string()))).collect()))
            .collect();
        json!({ "head": { "vars": self.vars }, "rows": rows })
    }

    /// Tab-separated table with a header line.
    pub fn to_tsv(&self) -> String {
        let mut out = self.vars.iter().map(|v| format!("?{v}")).collect::<Vec<_>>().join("\t");
        out.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = self.vars.iter().map(|v| r.get(v).map(|t| t.to_string()).unwrap_or_default()).collect();
            out.push_str(&cells.join("\t"));
            out.push('\n');
        }
        out
    }
}

/// Slot of an encoded pattern position.
#[derive(Debug, Clone, Copy)]
enum Slot {
    Var(usize),
    Const(TermId),
}

fn compare(term: &Term, op: CompareOp, value: &Term) -> bool {
    let ord = match (term.as_f64(), value.as_f64()) {
        (Some(a), Some(b)) => a.partial_cmp(&b),
        _ => match op {
            CompareOp::Eq => return term == value,
            CompareOp::Ne => return term != value,
            _ => Some(term.value().cmp(value.value())),
        },
    };
    let Some(ord) = ord else { return op == CompareOp::Ne };
    match op {
        CompareOp::Lt => ord == Ordering::Less,
        CompareOp::Gt => ord == Ordering::Greater,
        CompareOp::Le => ord != Ordering::Greater,
        CompareOp::Ge => ord != Ordering::Less,
        CompareOp::Eq => ord == Ordering::Equal,
        CompareOp::Ne => ord != Ordering::Equal,
    }
}

type Row = Vec<Option<TermId>>;

fn bind(slot: Slot, row: &Row) -> Option<TermId> {
    match slot {
        Slot::Const(id) => Some(id),
        Slot::Var(v) => row[v],
    }
}

/// Extend `row` with a matched triple; `None` on conflict (a variable
/// repeated within one pattern bound to two different terms).
fn extend(row: &Row, slots: &[Slot; 3], ids: [TermId; 3]) -> Option<Row> {
    let mut out = row.clone();
    for (slot, id) in slots.iter().zip(ids) {
        if let Slot::Var(v) = *slot {
            match out[v] {
                Some(existing) if existing != id => return None,
                _ => out[v] = Some(id),
            }
        }
    }
    Some(out)
}

fn candidates<'a>(store: &'a Store, slots: &[Slot; 3], row: &Row) -> impl Iterator<Item = [TermId; 3]> + 'a {
    let [s, p, o] = slots.map(|sl| bind(sl, row));
    store.match_ids(s, p, o)
}

/// Evaluate a parsed query: a join of all patterns, extended one pattern at
/// a time, always picking the remaining pattern with the fewest candidate
/// extensions over the current partial rows.
pub fn evaluate(ast: &QueryAst, store: &Store) -> QueryResult {
    let vars = ast.variables();
    let projected = ast.projected();
    let var_index = |name: &str| vars.iter().position(|v| v == name).expect("pattern variable");

    let mut encoded: Vec<[Slot; 3]> = Vec::with_capacity(ast.patterns.len());
    for p in &ast.patterns {
        let mut slots = [Slot::Const(0); 3];
        for (k, pos) in p.positions().into_iter().enumerate() {
            slots[k] = match pos {
                PatternTerm::Var(v) => Slot::Var(var_index(v)),
                PatternTerm::Term(t) => match store.term_id(t) {
                    Some(id) => Slot::Const(id),
                    None => return QueryResult { vars: projected, rows: vec![] },
                },
            };
        }
        encoded.push(slots);
    }

    let filters: Vec<(usize, &Filter)> = ast.filters.iter().map(|f| (var_index(&f.var), f)).collect();
    let passes = |row: &Row| {
        filters.iter().all(|(v, f)| match row[*v] {
            Some(id) => compare(store.term(id), f.op, &f.value),
            None => true,
        })
    };

    let mut rows: Vec<Row> = vec![vec![None; vars.len()]];
    let mut remaining: Vec<usize> = (0..encoded.len()).collect();
    while !remaining.is_empty() && !rows.is_empty() {
        let (pick, _) = remaining
            .iter()
            .enumerate()
            .map(|(k, &pi)| (k, rows.iter().map(|r| candidates(store, &encoded[pi], r).count()).sum::<usize>()))
            .min_by_key(|&(k, n)| (n, k))
            .expect("nonempty");
        let slots = encoded[remaining.remove(pick)];
        rows = rows
            .iter()
            .flat_map(|r| {
                candidates(store, &slots, r)
                    .filter_map(|ids| extend(r, &slots, ids))
                    .filter(|r| passes(r))
                    .collect::<Vec<_>>()
            })
            .collect();
    }

    let proj_idx: Vec<usize> = projected.iter().map(|v| var_index(v)).collect();
    let mut seen: HashSet<Vec<Option<TermId>>> = HashSet::new();
    let mut out = Vec::new();
    for r in rows {
        let key: Vec<Option<TermId>> = proj_idx.iter().map(|&i| r[i]).collect();
        if ast.distinct && !seen.insert(key.clone()) {
            continue;
        }
        let row: BindingRow = projected
            .iter()
            .zip(&key)
            .filter_map(|(v, id)| id.map(|id| (v.clone(), store.term(id).clone())))
            .collect();
        out.push(row);
        if ast.limit.is_some_and(|l| out.len() >= l) {
            break;
        }
    }
    QueryResult { vars: projected, rows: out }
}

//! In-memory triple store: dictionary-encoded terms under three orderings.

use std::collections::{BTreeSet, HashMap};
use std::ops::RangeInclusive;

use crate::kgmodel::{parse_ntriples, serialize_ntriples, ModelError, Term, Triple};

pub type TermId = u32;

/// Bijection between terms and dense ids.
#[derive(Debug, Default, Clone)]
pub struct TermDictionary {
    ids: HashMap<Term, TermId>,
    terms: Vec<Term>,
}

impl TermDictionary {
    pub fn get_or_insert(&mut self, t: &Term) -> TermId {
        if let Some(&id) = self.ids.get(t) {
            return id;
        }
        let id = TermId::try_from(self.terms.len()).expect("term dictionary overflow");
        self.terms.push(t.clone());
        self.ids.insert(t.clone(), id);
        id
    }

    pub fn id(&self, t: &Term) -> Option<TermId> {
        self.ids.get(t).copied()
    }

    pub fn term(&self, id: TermId) -> &Term {
        &self.terms[id as usize]
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Which ordering answers a pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexChoice {
    Spo,
    Pos,
    Osp,
}

impl IndexChoice {
    pub fn for_pattern(s: bool, p: bool, o: bool) -> IndexChoice {
        match (s, p, o) {
            (true, _, false) | (true, true, true) => IndexChoice::Spo,
            (false, true, _) => IndexChoice::Pos,
            (_, false, true) => IndexChoice::Osp,
            (false, false, false) => IndexChoice::Spo,
        }
    }
}

#[derive(Debug, Default, Clone)]
pub struct Store {
    dict: TermDictionary,
    spo: BTreeSet<[TermId; 3]>,
    pos: BTreeSet<[TermId; 3]>,
    osp: BTreeSet<[TermId; 3]>,
}

fn prefix_range(a: Option<TermId>, b: Option<TermId>) -> RangeInclusive<[TermId; 3]> {
    match (a, b) {
        (Some(a), Some(b)) => [a, b, 0]..=[a, b, TermId::MAX],
        (Some(a), None) => [a, 0, 0]..=[a, TermId::MAX, TermId::MAX],
        _ => [0, 0, 0]..=[TermId::MAX; 3],
    }
}

impl Store {
    pub fn new() -> Self {
        Store::default()
    }

    pub fn from_triples<'a>(triples: impl IntoIterator<Item = &'a Triple>) -> Self {
        let mut s = Store::new();
        s.bulk_load(triples);
        s
    }

    pub fn len(&self) -> usize {
        self.spo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spo.is_empty()
    }

    pub fn dictionary(&self) -> &TermDictionary {
        &self.dict
    }

    /// Set-semantics insert; true when the triple was not present.
    pub fn insert(&mut self, t: &Triple) -> bool {
        let [s, p, o] = [&t.s, &t.p, &t.o].map(|x| self.dict.get_or_insert(x));
        if !self.spo.insert([s, p, o]) {
            return false;
        }
        self.pos.insert([p, o, s]);
        self.osp.insert([o, s, p]);
        true
    }

    /// Number of newly added triples.
    pub fn bulk_load<'a>(&mut self, triples: impl IntoIterator<Item = &'a Triple>) -> usize {
        triples.into_iter().filter(|t| self.insert(t)).count()
    }

    pub fn remove(&mut self, t: &Triple) -> bool {
        let (Some(s), Some(p), Some(o)) = (self.dict.id(&t.s), self.dict.id(&t.p), self.dict.id(&t.o)) else {
            return false;
        };
        if !self.spo.remove(&[s, p, o]) {
            return false;
        }
        self.pos.remove(&[p, o, s]);
        self.osp.remove(&[o, s, p]);
        true
    }

    pub fn contains(&self, t: &Triple) -> bool {
        match (self.dict.id(&t.s), self.dict.id(&t.p), self.dict.id(&t.o)) {
            (Some(s), Some(p), Some(o)) => self.spo.contains(&[s, p, o]),
            _ => false,
        }
    }

    pub fn term_id(&self, t: &Term) -> Option<TermId> {
        self.dict.id(t)
    }

    pub fn term(&self, id: TermId) -> &Term {
        self.dict.term(id)
    }

    /// Encoded triples (in s, p, o order) agreeing with the bound positions.
    pub fn match_ids(
        &self,
        s: Option<TermId>,
        p: Option<TermId>,
        o: Option<TermId>,
    ) -> Box<dyn Iterator<Item = [TermId; 3]> + '_> {
        match IndexChoice::for_pattern(s.is_some(), p.is_some(), o.is_some()) {
            IndexChoice::Spo => {
                if let (Some(s), Some(p), Some(o)) = (s, p, o) {
                    return Box::new(self.spo.get(&[s, p, o]).into_iter().copied());
                }
                Box::new(self.spo.range(prefix_range(s, p)).copied())
            }
            IndexChoice::Pos => Box::new(
                self.pos
                    .range(prefix_range(p, o))
                    .map(|&[p, o, s]| [s, p, o])
                    .filter(move |t| s.is_none_or(|x| x == t[0])),
            ),
            IndexChoice::Osp => Box::new(self.osp.range(prefix_range(o, s)).map(|&[o, s, p]| [s, p, o])),
        }
    }

    /// Triples agreeing with the bound positions. A bound term unknown to
    /// the store matches nothing.
    pub fn match_pattern(&self, s: Option<&Term>, p: Option<&Term>, o: Option<&Term>) -> Vec<Triple> {
        let lookup = |t: Option<&Term>| match t {
            None => Ok(None),
            Some(t) => self.dict.id(t).map(Some).ok_or(()),
        };
        let (Ok(s), Ok(p), Ok(o)) = (lookup(s), lookup(p), lookup(o)) else {
            return vec![];
        };
        self.match_ids(s, p, o).map(|ids| self.decode(ids)).collect()
    }

    pub fn decode(&self, [s, p, o]: [TermId; 3]) -> Triple {
        Triple::new(self.term(s).clone(), self.term(p).clone(), self.term(o).clone())
    }

    /// All triples in SPO id order.
    pub fn iter(&self) -> impl Iterator<Item = Triple> + '_ {
        self.spo.iter().map(|&ids| self.decode(ids))
    }

    /// The three orderings as sets of (s, p, o); equal when coherent.
    pub fn index_views(&self) -> [BTreeSet<[TermId; 3]>; 3] {
        [
            self.spo.clone(),
            self.pos.iter().map(|&[p, o, s]| [s, p, o]).collect(),
            self.osp.iter().map(|&[o, s, p]| [s, p, o]).collect(),
        ]
    }

    pub fn to_ntriples(&self) -> String {
        let ts: Vec<Triple> = self.iter().collect();
        serialize_ntriples(&ts)
    }

    pub fn from_ntriples(text: &str) -> Result<Self, ModelError> {
        Ok(Store::from_triples(&parse_ntriples(text)?))
    }

    /// Objects of `s p ?`.
    pub fn objects(&self, s: &Term, p: &Term) -> Vec<Term> {
        self.match_pattern(Some(s), Some(p), None).into_iter().map(|t| t.o).collect()
    }

    /// Subjects of `? p o`.
    pub fn subjects(&self, p: &Term, o: &Term) -> Vec<Term> {
        self.match_pattern(None, Some(p), Some(o)).into_iter().map(|t| t.s).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kgmodel::ns;

    fn t(s: &str, p: &str, o: &str) -> Triple {
        Triple::iri(s, p, Term::iri(o))
    }

    #[test]
    fn set_semantics() {
        let mut st = Store::new();
        assert!(st.is_empty());
        assert!(st.insert(&t("urn:a", "urn:p", "urn:b")));
        assert!(!st.insert(&t("urn:a", "urn:p", "urn:b")));
        assert_eq!(st.len(), 1);
        assert!(st.remove(&t("urn:a", "urn:p", "urn:b")));
        assert!(st.is_empty());
        assert_eq!(st.bulk_load(&[]), 0);
    }

    #[test]
    fn index_choice() {
        assert_eq!(IndexChoice::for_pattern(true, false, false), IndexChoice::Spo);
        assert_eq!(IndexChoice::for_pattern(true, true, false), IndexChoice::Spo);
        assert_eq!(IndexChoice::for_pattern(false, true, true), IndexChoice::Pos);
        assert_eq!(IndexChoice::for_pattern(false, false, true), IndexChoice::Osp);
        assert_eq!(IndexChoice::for_pattern(true, false, true), IndexChoice::Osp);
    }

    #[test]
    fn fully_bound_match() {
        let st = Store::from_triples(&[t("urn:a", ns::RDF_TYPE, ns::KWG_S2_CELL), t("urn:b", ns::RDF_TYPE, ns::KWG_S2_CELL)]);
        let ty = Term::iri(ns::RDF_TYPE);
        let cell = Term::iri(ns::KWG_S2_CELL);
        assert_eq!(st.match_pattern(None, Some(&ty), Some(&cell)).len(), 2);
        assert_eq!(st.match_pattern(Some(&Term::iri("urn:a")), Some(&ty), Some(&cell)).len(), 1);
        assert_eq!(st.match_pattern(Some(&Term::iri("urn:zz")), None, None).len(), 0);
    }

    #[test]
    fn ntriples_roundtrip() {
        let st = Store::from_triples(&[t("urn:a", "urn:p", "urn:b"), Triple::iri("urn:a", "urn:q", Term::integer(4))]);
        let text = st.to_ntriples();
        let back = Store::from_ntriples(&text).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back.to_ntriples(), text);
    }
}

use std::collections::{HashMap, HashSet};

use crate::types::DescriptiveText;

/// Case-folded term counts over the descriptions, most frequent first, ties lexicographic.
///
/// Tokens are maximal runs of alphanumeric characters.
pub fn term_frequency(texts: &[DescriptiveText], stopwords: &HashSet<String>) -> Vec<(String, usize)> {
    let stop: HashSet<String> = stopwords.iter().map(|s| s.to_lowercase()).collect();
    let mut counts: HashMap<String, usize> = HashMap::new();
    for t in texts {
        for token in t
            .description
            .split(|c: char| !c.is_alphanumeric())
            .filter(|s| !s.is_empty())
        {
            let term = token.to_lowercase();
            if !stop.contains(&term) {
                *counts.entry(term).or_default() += 1;
            }
        }
    }
    let mut out: Vec<_> = counts.into_iter().collect();
    out.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(ds: &[&str]) -> Vec<DescriptiveText> {
        ds.iter()
            .map(|d| DescriptiveText {
                contract: String::new(),
                name: String::new(),
                description: d.to_string(),
            })
            .collect()
    }

    #[test]
    fn counts_sorted_descending() {
        let tf = term_frequency(&texts(&["art art game"]), &HashSet::new());
        assert_eq!(tf, vec![("art".to_string(), 2), ("game".to_string(), 1)]);
    }

    #[test]
    fn empty_and_case_folding() {
        assert!(term_frequency(&[], &HashSet::new()).is_empty());
        let tf = term_frequency(&texts(&["Art ART"]), &HashSet::new());
        assert_eq!(tf, vec![("art".to_string(), 2)]);
    }

    #[test]
    fn punctuation_stopwords_and_ties() {
        let stop: HashSet<String> = ["The".to_string()].into();
        let tf = term_frequency(&texts(&["the zebra, the apple!", "Zebra...apple"]), &stop);
        assert_eq!(tf, vec![("apple".to_string(), 2), ("zebra".to_string(), 2)]);
    }
}

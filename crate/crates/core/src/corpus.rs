//! The bundled example inputs.

use crate::gog::{parse_gog, GraphOfGroups};

pub const ENTRIES: &[(&str, &str)] = &[
    ("trivial", include_str!("../../../corpus/trivial.gog")),
    ("dinf", include_str!("../../../corpus/dinf.gog")),
    ("z2z3", include_str!("../../../corpus/z2z3.gog")),
    ("f2", include_str!("../../../corpus/f2.gog")),
    ("loop", include_str!("../../../corpus/loop.gog")),
    ("z2", include_str!("../../../corpus/z2.gog")),
    ("z2z2", include_str!("../../../corpus/z2z2.gog")),
    ("zz2", include_str!("../../../corpus/zz2.gog")),
    ("sl2z", include_str!("../../../corpus/sl2z.gog")),
    ("z2xz", include_str!("../../../corpus/z2xz.gog")),
    ("dinf3", include_str!("../../../corpus/dinf3.gog")),
];

pub fn source(name: &str) -> Option<&'static str> {
    ENTRIES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Parses a bundled input; panics on an unknown name.
pub fn load(name: &str) -> GraphOfGroups {
    parse_gog(source(name).unwrap_or_else(|| panic!("no corpus entry {name}"))).expect("corpus entries parse")
}

#[cfg(test)]
mod tests {
    #[test]
    fn every_entry_parses() {
        for (name, _) in super::ENTRIES {
            super::load(name);
        }
    }
}

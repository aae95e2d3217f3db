use super::*;
use crate::expr::is_zero;
use crate::liealg::labels::Verdict;

fn entry(id: &str) -> TableEntry {
    bundled().into_iter().find(|e| e.id == id).expect("entry present")
}

fn report(id: &str) -> VerificationReport {
    verify_entry(&entry(id)).expect("verifies")
}

fn same(a: &Expr, src: &str, table: &SymbolTable) {
    let b = parse_expr(src, table).unwrap();
    assert_eq!(is_zero(&(a - &b)), Decision::Zero, "{a} vs {src}");
}

#[test]
fn bundled_catalog_has_every_row() {
    let entries = bundled();
    assert_eq!(entries.len(), 40);
    for (table, n) in TABLE_SIZES {
        assert_eq!(entries.iter().filter(|e| e.table() == table).count(), n, "table {table}");
    }
}

#[test]
fn load_rejects_duplicates_and_unknown_fields() {
    let one = "[[entry]]\nid = \"1.1\"\nA1 = \"0\"\nA2 = \"0\"\nA0 = \"0\"\nsymmetries = []\nalgebra = \"n_{1,1}\"\n";
    let dup = format!("{one}\n{one}");
    assert!(matches!(load_catalog(&dup), Err(CatalogError::Schema { .. })));
    let bad = one.replace("algebra", "algebre");
    assert!(matches!(load_catalog(&bad), Err(CatalogError::Syntax(_))));
    let undeclared = one.replace("A0 = \"0\"", "A0 = \"Q(x1)\"");
    assert!(load_catalog(&undeclared).is_err());
}

#[test]
fn select_by_table_and_item() {
    let entries = bundled();
    assert_eq!(select(&entries, "all").unwrap().len(), 40);
    assert_eq!(select(&entries, "").unwrap().len(), 40);
    assert_eq!(select(&entries, "3").unwrap().len(), 11);
    let one = select(&entries, "1.8").unwrap();
    assert_eq!(one.len(), 1);
    assert_eq!(one[0].id, "1.8");
    assert!(select(&entries, "9.9").is_err());
    assert!(select(&entries, "7").is_err());
}

#[test]
fn instantiate_translation_potential() {
    let e = entry("1.1");
    let b: BTreeMap<String, String> =
        [("F", "_1*_2"), ("G", "0"), ("R", "_1^2")].into_iter().map(|(k, v)| (k.into(), v.into())).collect();
    let p = instantiate(&e, &b).unwrap();
    let t = SymbolTable::standard();
    same(&p.a1, "x3*x2", &t);
    same(&p.a2, "x3*x1", &t);
    same(&p.v, "x1^2 + x3^2*(x1^2 + x2^2)/2", &t);
}

#[test]
fn instantiate_inverse_square() {
    let b: BTreeMap<String, String> = [("kappa".to_string(), "1".to_string())].into_iter().collect();
    let p = instantiate(&entry("1.8"), &b).unwrap();
    same(&p.v, "1/r^2", &SymbolTable::standard());
    // binding a name the entry does not declare is an error
    assert!(instantiate(&entry("1.8"), &[("F".to_string(), "_1".to_string())].into_iter().collect()).is_err());
}

#[test]
fn inverse_square_entry_is_verified() {
    let r = report("1.8");
    assert_eq!(r.status, EntryStatus::Verified);
    assert_eq!(r.closure.dim, Some(7));
    assert!(r.passes() && !r.quarantined());
    assert_eq!(r.branches[0].verdict.verdict, Verdict::Match);
    assert!(r.flags.iter().all(|f| f.decision == Decision::Zero));
}

#[test]
fn rotation_invariant_entry_matches_either_real_form() {
    let r = report("1.7");
    assert_eq!(r.branches[0].verdict.verdict, Verdict::Match);
    let fp = r.fingerprint.unwrap();
    assert!(fp.generic.names.iter().any(|n| n == "so(3) + 2n_{1,1}"));
}

#[test]
fn solvable_labels_match() {
    for (id, name) in [("2.9", "s_{7,1}"), ("3.5", "s_{9,1}"), ("3.10", "s_{8,2}")] {
        let r = report(id);
        assert_eq!(r.status, EntryStatus::Verified, "{id}");
        assert_eq!(r.branches[0].verdict.verdict, Verdict::Match, "{id}");
        assert!(r.fingerprint.unwrap().generic.names.iter().any(|n| n == name), "{id}");
    }
}

#[test]
fn kappa_branches_split() {
    for id in ["2.1", "2.2", "2.5"] {
        let r = report(id);
        assert_eq!(r.branches.len(), 2, "{id}");
        assert!(r.branches.iter().all(|b| b.verdict.verdict == Verdict::Match), "{id}");
    }
    let r = report("2.6");
    let generic = r.branches.iter().find(|b| b.condition == "kappa != 0").unwrap();
    let zero = r.branches.iter().find(|b| b.condition == "kappa = 0").unwrap();
    assert_eq!(generic.verdict.verdict, Verdict::Mismatch);
    assert_eq!(zero.verdict.verdict, Verdict::Match);
    assert!(r.label_conflict.is_some() && r.passes());
}

#[test]
fn corrected_readings_are_quarantined() {
    for id in ["1.5", "1.9", "2.3", "4.1", "4.7"] {
        let r = report(id);
        assert_eq!(r.printed.decision, Decision::NonZero, "{id}");
        assert_eq!(r.status, EntryStatus::Quarantined, "{id}");
        assert!(r.quarantined() && r.passes(), "{id}");
        assert!(r.annotations.iter().any(|a| a.starts_with("corrected reading")), "{id}");
    }
}

#[test]
fn failing_reading_without_correction_fails() {
    let mut e = entry("4.1");
    e.corrected = None;
    let r = verify_entry(&e).unwrap();
    assert_eq!(r.status, EntryStatus::Failed);
    assert!(!r.passes());
}

#[test]
fn flags_checked_by_transformation() {
    let r = report("1.2");
    let f = r.flags.iter().find(|f| f.flag == "blackstar").unwrap();
    assert_eq!(f.decision, Decision::Zero);
    let r = report("2.7");
    let f = r.flags.iter().find(|f| f.flag == "star").unwrap();
    assert_eq!(f.decision, Decision::Zero);
}

#[test]
fn worked_examples_hold() {
    let suite = worked_example_suite();
    assert_eq!(suite.len(), WORKED_EXAMPLES.len());
    for w in &suite {
        assert!(w.holds(), "{}", w.name);
    }
    assert_eq!(suite.iter().filter(|w| w.quarantined()).count(), 2);
}

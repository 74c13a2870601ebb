mod support;

use proptest::prelude::*;

use oneway_epp::code::{build_code, decode_and_classify, syndrome, CodeId, LogicalEffect, StabilizerCodeDef};
use oneway_epp::pauli::PauliString;

use support::in_span;

fn codes() -> Vec<StabilizerCodeDef> {
    [CodeId::RepetitionZ(3), CodeId::RepetitionZ(5), CodeId::FiveOneThree, CodeId::SurfaceD3]
        .into_iter()
        .map(|id| build_code(id).unwrap())
        .collect()
}

fn masks(code: &StabilizerCodeDef) -> Vec<(u64, u64)> {
    code.stabilizers.iter().map(PauliString::to_masks).collect()
}

#[test]
fn group_membership_agrees_with_linear_algebra() {
    for code in codes() {
        let rows = masks(&code);
        let full = (1u64 << code.n) - 1;
        let mut state = 0x9e37_79b9_7f4a_7c15u64;
        for _ in 0..1000 {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let x = state & full;
            let z = (state >> 32) & full;
            let p = PauliString::from_masks(code.n, x, z);
            assert_eq!(code.in_stabilizer_group(&p), in_span(&rows, (x, z), code.n), "{} {p}", code.id);
        }
        for s in &code.stabilizers {
            assert!(code.in_stabilizer_group(s));
        }
    }
}

#[test]
fn logicals_are_outside_the_group_and_commute_with_it() {
    for code in codes() {
        for l in [&code.logical_x, &code.logical_z] {
            assert!(!code.in_stabilizer_group(l));
            assert!(code.stabilizers.iter().all(|s| s.commutes(l)));
        }
        assert!(!code.logical_x.commutes(&code.logical_z));
    }
}

#[test]
fn every_syndrome_has_a_correction() {
    for code in codes() {
        let table = code.decoder();
        assert!(table.is_complete(), "{}", code.id);
        for (s, c) in table.entries() {
            let bits = syndrome(&code, c).unwrap();
            let value = bits.iter().enumerate().fold(0u64, |a, (i, &b)| a | ((b as u64) << i));
            assert_eq!(value, s);
        }
    }
}

#[test]
fn logical_operators_classify_as_themselves() {
    for code in codes() {
        let y = code.logical_x.compose(&code.logical_z);
        assert_eq!(decode_and_classify(&code, &PauliString::identity(code.n)), LogicalEffect::Identity);
        // a stabilizer times a logical is still that logical
        let s0 = &code.stabilizers[0];
        assert_eq!(decode_and_classify(&code, &code.logical_x.compose(s0)), LogicalEffect::LogicalX);
        assert_eq!(decode_and_classify(&code, &code.logical_z), LogicalEffect::LogicalZ);
        assert_eq!(decode_and_classify(&code, &y), LogicalEffect::LogicalY);
    }
}

#[test]
fn decoder_table_dump_is_structured() {
    let code = build_code(CodeId::SurfaceD3).unwrap();
    let text = code.decoder_table_text();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "syndrome correction weight support");
    assert_eq!(rows.len(), 1 + 256);
    for row in &rows[1..] {
        let cols: Vec<&str> = row.split_whitespace().collect();
        assert_eq!(cols.len(), 4, "{row}");
        assert_eq!(cols[0].len(), 8);
        assert_eq!(cols[1].len(), 9);
    }
}

proptest! {
    // Residual after decoding always has trivial syndrome, and stabilizers never change the class.
    #[test]
    fn stabilizer_equivalent_errors_decode_alike(seed in any::<u64>(), which in 0usize..4, stab in any::<u16>()) {
        let code = &codes()[which];
        let full = (1u64 << code.n) - 1;
        let e = if code.id.name().starts_with("repetition") {
            PauliString::from_masks(code.n, seed & full, 0)
        } else {
            PauliString::from_masks(code.n, seed & full, (seed >> 20) & full)
        };
        let mut g = PauliString::identity(code.n);
        for (i, s) in code.stabilizers.iter().enumerate() {
            if (stab >> i) & 1 == 1 {
                g = g.compose(s);
            }
        }
        prop_assert_eq!(decode_and_classify(code, &e), decode_and_classify(code, &e.compose(&g)));
    }
}

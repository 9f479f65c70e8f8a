use legendrian_dga::diagram::{Crossing, Diagram};
use legendrian_dga::disks::*;
use legendrian_dga::algebra::{GenKind, Letter};
use std::collections::BTreeMap;

fn main() {
    let d = Diagram::build(
        0, -5, vec![1, 1],
        vec![Crossing { id: 1, sign: -1, plus_pair: 0, anchor: 1 }],
        1, BTreeMap::new(), Vec::new(), vec![-1, -3, -1],
    ).unwrap();
    let budget = SearchBudget { max_walk: 48, max_mult: 3, max_t: 3 };
    for kind in [GenKind::A, GenKind::B, GenKind::D] {
        let x = Letter::new(kind, 1);
        let walker = enumerate_ext_disks(&d, x, &budget).unwrap();
        let oracle = oracle_enumerate(&d, x, &budget).unwrap();
        println!("== kind {kind:?}: walker {} oracle {}", walker.disks.len(), oracle.len());
        for k in &walker.disks {
            println!("  W {:?} t={}", k.class, k.t_power);
        }
        for k in &oracle {
            println!("  O {:?} t={}", k.class, k.t_power);
        }
    }
}

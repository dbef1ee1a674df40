use parlink_core::{Code, FieldOrder, UpSet};
use parlink_core::model::unit_scenario;
use rand::{Rng, SeedableRng};

fn main() {
    let f = FieldOrder::TERNARY;
    let a1 = Code::parse("A,B,A+B,A+C,B+C", f).unwrap();
    let a2 = Code::parse("A,B,A+B,A+C,B+2C", f).unwrap();
    // Compare recoverable portions on every up-set.
    for s in UpSet::enumerate(5) {
        let r1 = a1.recoverable_portions(s);
        let r2 = a2.recoverable_portions(s);
        if r1 != r2 {
            println!("up-set {:05b}: alpha1 {:?} vs alpha2 {:?}", s.0, r1, r2);
        }
    }
    // Payoff domination on random scenarios.
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let mut dominated = 0;
    for _ in 0..1000 {
        let probs: Vec<f64> = (0..5).map(|_| rng.gen()).collect();
        let worths: Vec<f64> = (0..3).map(|_| rng.gen_range(1.0..=100.0)).collect();
        let sc = unit_scenario(&probs, &worths);
        let p1 = a1.payoff(&sc).unwrap();
        let p2 = a2.payoff(&sc).unwrap();
        if p1 > p2 { dominated += 1; }
    }
    println!("alpha=1 strictly better on {dominated}/1000 random scenarios");
}

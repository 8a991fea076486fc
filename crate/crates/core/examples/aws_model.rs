//! Prints the aided-detection network for a scenario as a model file.
//!
//! Usage: `cargo run -p responsibility --example aws_model -- [d_human d_automation [p_t]]`

use responsibility::aided_decision::ScenarioParams;
use responsibility::flowmodel::aws_network;

fn main() {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("numeric argument"))
        .collect();
    let (d_h, d_a) = match args[..] {
        [] => (2.0, 2.0),
        [h, a, ..] => (h, a),
        _ => panic!("give both d_human and d_automation"),
    };
    let mut params = ScenarioParams::reference(d_h, d_a);
    if let Some(&p_t) = args.get(2) {
        params.p_t = p_t;
    }
    let model = aws_network(&params).expect("valid scenario");
    println!("{}", model.to_json_pretty());
}

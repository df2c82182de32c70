use std::collections::HashMap;
use serde::Deserialize;
extern crate tokio_fast_db;

fn main() {
    let v: HashMap<String, u32> = HashMap::new();
    let n = regex::Regex::new("a+").unwrap();
    println!("{:?} {:?}", v, n);
}

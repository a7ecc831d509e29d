fn main() {
    println!("scenemotion");
}

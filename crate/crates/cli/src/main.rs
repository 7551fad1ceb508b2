fn main() {
    println!("hvqe: not yet wired");
}

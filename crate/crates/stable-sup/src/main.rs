fn main() {
    std::process::exit(stable_sup::run::main_entry());
}

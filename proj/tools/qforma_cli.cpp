// qforma command-line front end. Subcommands land together with the library
// layers they expose.
#include <cstdio>

int main() {
    std::printf("qforma: no subcommands wired yet\n");
    return 3;
}

#include <iostream>

int main(int argc, char** argv) {
    // CLI wiring lands once the library surface is in place.
    (void)argc;
    (void)argv;
    std::cout << "subriem\n";
    return 0;
}

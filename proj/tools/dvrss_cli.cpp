// placeholder; subcommands are filled in as the library lands
#include <iostream>

int main()
{
    std::cout << "dvrss\n";
    return 0;
}

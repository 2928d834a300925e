#include <iostream>
int main(){ std::cout << "tilesmith: command-line interface pending\n"; return 0; }

#include <iostream>
int main(){ std::cout << "acceptance checks pending\n"; return 1; }

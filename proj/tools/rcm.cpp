#include <cstdio>
int main() { std::puts("rcm cli placeholder"); return 0; }

#include "crystalseg/rng.hpp"
#include "doctest.h"

using namespace crystalseg;

TEST_CASE("splitmix64 reference vectors") {
    SplitMix64 sm{0};
    CHECK(sm.next() == 0xE220A8397B1DCDAFULL);
    CHECK(sm.next() == 0x6E789E6AA1B965F4ULL);
    CHECK(sm.next() == 0x06C45D188009454FULL);
}

TEST_CASE("xoshiro256** seeded through splitmix64") {
    Xoshiro256StarStar rng(0);
    CHECK(rng.next() == 0x99EC5F36CB75F2B4ULL);
    CHECK(rng.next() == 0xBF6E1F784956452AULL);
    CHECK(rng.next() == 0x1A5F849D4933E6E0ULL);
    CHECK(rng.next() == 0x6AA594F1262D2D2CULL);

    Xoshiro256StarStar rng42(42);
    CHECK(rng42.next() == 0x15780B2E0C2EC716ULL);
    CHECK(rng42.next() == 0x6104D9866D113A7EULL);
}

TEST_CASE("derived draws stay in range") {
    Xoshiro256StarStar rng(7);
    for (int i = 0; i < 2000; ++i) {
        const double d = rng.next_double();
        CHECK(d >= 0.0);
        CHECK(d < 1.0);
        const int v = rng.next_int(3, 9);
        CHECK(v >= 3);
        CHECK(v <= 9);
        CHECK(rng.next_below(17) < 17);
        const double g = rng.next_gaussian();
        CHECK(g >= -6.0);
        CHECK(g <= 6.0);
    }
}

TEST_CASE("identical seeds give identical streams") {
    Xoshiro256StarStar a(1234), b(1234);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
}

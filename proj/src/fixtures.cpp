#include "scma/fixtures.hpp"

#include <algorithm>

#include "scma/codebook_io.hpp"
#include "scma/errors.hpp"

namespace scma {

namespace {

// Reference codebooks for K = 4, M = 4, N = 2, all designed at varsigma2 = 5,
// Pe = 30, sigma2 = 0.01.
constexpr const char* k_dr_j3 = R"(scma-codebook
version 1
K 4
J 3
M 4
N 2
sigma2 0.01
varsigma2 5
Pe 30
labeling natural-binary
graph
0 1 1
1 0 1
0 1 0
1 0 0
user 1
3.1908 0.4595 0.109 0.4907
4.6727 9.162 1.8083 0.1476
user 2
0.1074 2.989 3.0405 0.13
1.3517 0.1077 8.8601 4.5986
user 3
0.1119 0.1105 5.3128 5.3146
0.1123 5.6158 5.6235 0.1178
end
)";

constexpr const char* k_ls_j3 = R"(scma-codebook
version 1
K 4
J 3
M 4
N 2
sigma2 0.01
varsigma2 5
Pe 30
labeling natural-binary
graph
0 1 1
1 0 1
0 1 0
1 0 0
user 1
2.7712 0.01 0.01 2.6317
4.4089 9.1626 1.4151 0.01
user 2
0.01 2.7785 2.5709 0.01
0.01 1.4036 9.1888 4.3893
user 3
0.01 5.4749 0.01 5.4747
0.01 5.4797 5.4796 0.01
end
)";

constexpr const char* k_ls_j4 = R"(scma-codebook
version 1
K 4
J 4
M 4
N 2
sigma2 0.01
varsigma2 5
Pe 30
labeling natural-binary
graph
0 1 1 0
1 0 1 0
0 1 0 1
1 0 0 1
user 1
1.5383 3.0405 0.0167 8.9796
1.3426 5.0483 0.0173 0.0374
user 2
0.0191 3.5636 4.1652 0.9455
0.0156 0.5631 8.9683 2.7765
user 3
0.0278 6.5059 0.0257 6.4581
0.0296 4.1903 4.2063 0.0268
user 4
0.0207 1.5398 5.0348 0.0264
0.0154 2.381 0.3892 9.269
end
)";

constexpr const char* k_ls_j5 = R"(scma-codebook
version 1
K 4
J 5
M 4
N 2
sigma2 0.01
varsigma2 5
Pe 30
labeling natural-binary
graph
0 1 1 0 1
1 0 1 0 0
0 1 0 1 0
1 0 0 1 1
user 1
1.8229 0.8713 0.0707 9.3633
0.2044 4.4911 1.5872 0.5904
user 2
1.3717 4.8155 1.219 0.1399
0.0725 1.1399 9.0214 2.4409
user 3
0.179 0.3468 2.3449 8.1443
0.0915 2.983 5.7936 0.3253
user 4
0.0936 1.8345 4.8909 0.6543
1.1709 0.1005 2.2914 9.0194
user 5
3.1438 0.15 6.2322 1.5089
0.1397 1.4186 3.372 6.4569
end
)";

constexpr const char* k_ls_j6 = R"(scma-codebook
version 1
K 4
J 6
M 4
N 2
sigma2 0.01
varsigma2 5
Pe 30
labeling natural-binary
graph
0 1 1 0 1 0
1 0 1 0 0 1
0 1 0 1 0 1
1 0 0 1 1 0
user 1
0.8677 2.1631 0.0295 6.5262
1.8603 8.1426 0.0594 0.0741
user 2
0.8433 5.9356 2.0682 0.0335
0.0379 0.058 8.6673 1.8618
user 3
0.1106 0.0293 1.9845 9.2333
0.0687 4.7442 2.2192 0.093
user 4
0.0476 1.5733 5.8671 0.0408
1.0104 0.0347 0.4297 8.9561
user 5
3.2891 0.0679 3.8873 0.1111
0.0304 1.3519 3.6688 5.7811
user 6
0.0788 9.8115 0.0528 1.9884
3.9862 1.1829 0.7601 0.0323
end
)";

const FixtureInfo kFixtures[] = {
    {"dr-j3", "Distance-range baseline codebook, J=3", k_dr_j3},
    {"ls-j3", "Log-sum-exp codebook, J=3", k_ls_j3},
    {"ls-j4", "Log-sum-exp codebook, J=4", k_ls_j4},
    {"ls-j5", "Log-sum-exp codebook, J=5", k_ls_j5},
    {"ls-j6", "Log-sum-exp codebook, J=6", k_ls_j6},
};

}  // namespace

std::span<const FixtureInfo> fixtures() { return kFixtures; }

const FixtureInfo& fixture(std::string_view name) {
  const auto it = std::find_if(std::begin(kFixtures), std::end(kFixtures),
                               [&](const FixtureInfo& f) { return f.name == name; });
  if (it == std::end(kFixtures)) throw IndexError("unknown fixture '" + std::string(name) + "'");
  return *it;
}

CodebookSet load_fixture(std::string_view name) { return parse_codebook(fixture(name).text); }

}  // namespace scma

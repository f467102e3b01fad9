#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <vector>

#include "fepool/error.hpp"
#include "fepool/eval.hpp"

using namespace fepool;

namespace {

// fixed loss pair; expected statistic/p-value were computed with an
// independent direct-formula implementation of the test
static const std::vector<double> kLossASeed13 = {
    3.3370395293474786, 9.476127349343475, 0.91788658078459084, 0.0048493434763022588,
    1.7377831262533874, 0.14870991845431999, 3.3388740920881128, 0.0010076662450853532,
    0.26649283936101525, 0.33696274390277842, 0.18671633961515186, 0.12733432699203642,
    0.061159180369963664, 0.51759488942776433, 0.49606101920980783, 0.24397102379802021,
    0.13521338283265399, 3.2644915119022531, 2.8197377188690429, 0.050306398130248293,
    1.7883109261124086, 0.17427752201278673, 3.7789912691274008, 2.3627070787127247,
    0.10131389649449429, 2.1926603055908478, 0.90273470631653752, 1.5841196298611107,
    2.191654117133218, 0.11781120402557443, 1.1339618946776737, 0.050011334778416357,
    0.134789941878908, 0.6489269855839358, 0.11751185038166174, 1.1048640652023241,
    0.79359491898768231, 0.068712903876087555, 1.5525268335225533, 0.45427228206897435,
    2.1021344316717054, 0.28180692976083138, 0.53997274392701555, 0.55244317274956589,
    0.055672280457555616, 0.21330979372169526, 0.074206069683796352, 0.45958924247818028,
    0.28673452842109137, 1.9950442923132048, 0.0013521243076906313, 0.40144194538705402,
    0.015851613998464499, 1.0579262671399274, 0.4444044259914689, 0.76705974541700084,
    0.121398583834348, 2.6896127333382567, 0.13042974044351854, 0.11166696716330059,
    0.35029824011691585, 0.37327542319661838, 0.38738209697571663, 0.4154223195138162,
    0.52921962773115794, 1.3504665834180793, 0.32987963241357987, 7.19904468935888,
    0.90941484906703873, 1.1523796650264448, 1.4580832491652922, 0.16627445494888643,
    3.303463406378214, 0.09449387085737454, 0.54088048702797398, 0.48835322870423553,
    0.0047847281536522518, 0.014563934814821832, 0.471521336199557, 2.2634210681754158e-06,
    0.18882256064085148, 3.6530928318968003, 2.5928223961782866, 1.1762716058169844,
    0.71065671334289227, 0.25670102944778483, 1.0408160065881382, 0.03442755031225344,
    1.4248057904755258, 0.11566596301940915, 2.7261326100528254, 0.017442971847214012,
    1.3602287167749121, 0.049559899802827476, 0.13646785738201234, 1.9205261553266779,
    1.7847291567969503, 0.12074095676586391, 0.024617139473405807, 0.079513385516281884};

static const std::vector<double> kLossBSeed13 = {
    5.4907311876703684, 6.0615009588351443, 0.035459755398211355, 0.0035122114594386077,
    0.6151037216610753, 0.0044228935418830946, 6.5316292562780305, 0.20229073609623158,
    0.12832778096554301, 0.040236719100212995, 0.60270006635149775, 0.026240424561274633,
    0.027301272337608932, 0.3760404821558071, 1.3129882803415636, 0.74616038327688905,
    0.43304901515758881, 4.5308701510489815, 4.4598369567737626, 0.11153373086239983,
    0.54275538685674563, 0.035019884097467112, 8.2622196891875994, 1.782321519041183,
    0.44753138305648271, 2.37782228730453, 0.74077633915525809, 0.67410520468665569,
    2.198737723438998, 0.02232309231761688, 0.001280598892583339, 1.8682198801550265,
    0.0073535030143458066, 0.45249180652794363, 0.16002170146041747, 0.34889418710708781,
    1.510650609745203, 0.10240224649407291, 0.82034911714364289, 0.00031596157265431434,
    1.2872538530195106, 0.17839312911584998, 0.62675489261975514, 1.0586731069845192,
    0.052100301173678268, 0.83357813402160441, 0.52636207370955301, 0.33918537755935463,
    0.052952886178847171, 1.9607104361626073, 0.00020443438812499926, 0.085368293670683798,
    0.0084828903456135724, 1.2549492464269472, 0.039964413832046158, 0.54474432782348059,
    2.6506883615440842, 3.3987835777793292, 0.07898057617082084, 0.6876349950475511,
    0.54406176233311476, 0.31890633128820822, 2.011529273229018, 1.5973404036412748,
    0.59560133637733503, 2.2059572481925294, 0.2112958356633009, 3.6558722026312926,
    1.9902198031125464, 0.7237668012740851, 0.77087739881647455, 0.029736401408234008,
    2.6869277804400058, 0.039884370530659435, 1.3802026536526149, 0.5687242301820522,
    0.25310771898866874, 0.27605903035465884, 0.31111530144056698, 0.23629381620493387,
    0.51548920919383023, 0.94400782924304605, 1.7974495703050939, 0.15654664098269069,
    0.062116997753269017, 0.014034161541853055, 0.43899821899960501, 0.045920918257962233,
    1.4983737185328527, 0.022775054492734249, 5.4431787763152402, 0.07265183854811029,
    0.2999492073390394, 0.15563880909027536, 0.91350352376173427, 0.57269321190371203,
    5.5884348127962964, 1.8090519801558353, 0.55313607088467731, 0.37639470323372876};

constexpr double kDmStat = -0.99838594869758512;
constexpr double kDmP = 0.32052627924641985;

} // namespace

TEST_CASE("mase worked example") {
    const std::vector<double> train = {1, 2, 3, 4};
    const std::vector<double> actuals = {5, 7};
    const std::vector<double> forecasts = {5, 6};
    CHECK(mase(train, actuals, forecasts) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("mase is zero for perfect forecasts and errors on constant training data") {
    const std::vector<double> train = {1, 3, 2, 4};
    const std::vector<double> actuals = {5, 6, 7};
    CHECK(mase(train, actuals, actuals) == 0.0);

    const std::vector<double> flat = {3, 3, 3};
    CHECK_THROWS_WITH_AS(mase(flat, actuals, actuals), doctest::Contains("DegenerateScale"),
                         NumericError);
}

TEST_CASE("mase is scale free") {
    const std::vector<double> train = {1, 2, 5, 3};
    const std::vector<double> actuals = {4, 6};
    const std::vector<double> forecasts = {5, 5.5};
    const double base = mase(train, actuals, forecasts);
    for (double c : {-3.0, 0.25, 1e6}) {
        std::vector<double> tr = train, ac = actuals, fo = forecasts;
        for (auto* v : {&tr, &ac, &fo}) {
            for (double& x : *v) x *= c;
        }
        CHECK(mase(tr, ac, fo) == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("average_log_score") {
    const std::vector<double> two = {-1.0, -2.0};
    CHECK(average_log_score(two) == doctest::Approx(-1.5));
    const std::vector<double> one = {-0.7};
    CHECK(average_log_score(one) == -0.7);

    std::vector<double> perm = {-1.0, -0.5, -2.5, -3.0, -0.1};
    const double before = average_log_score(perm);
    std::reverse(perm.begin(), perm.end());
    CHECK(average_log_score(perm) == doctest::Approx(before).epsilon(1e-15));

    CHECK_THROWS_AS(average_log_score({}), ConfigError);
}

TEST_CASE("dm test matches the independent oracle") {
    const DmResult r = dm_test(kLossASeed13, kLossBSeed13, 1);
    CHECK(!r.degenerate);
    CHECK(r.statistic == doctest::Approx(kDmStat).epsilon(1e-6));
    CHECK(r.p_value == doctest::Approx(kDmP).epsilon(1e-6));
}

TEST_CASE("dm test degenerate and antisymmetry") {
    const DmResult same = dm_test(kLossASeed13, kLossASeed13, 1);
    CHECK(same.degenerate);
    CHECK(same.statistic == 0.0);
    CHECK(same.p_value == 1.0);

    const DmResult ab = dm_test(kLossASeed13, kLossBSeed13, 3);
    const DmResult ba = dm_test(kLossBSeed13, kLossASeed13, 3);
    CHECK(ab.statistic == doctest::Approx(-ba.statistic).epsilon(1e-14));
    CHECK(ab.p_value == doctest::Approx(ba.p_value).epsilon(1e-14));
    CHECK(ab.p_value >= 0.0);
    CHECK(ab.p_value <= 1.0);

    std::vector<double> short_a(5, 1.0), short_b(5, 2.0);
    CHECK_THROWS_AS(dm_test(short_a, short_b, 1), ConfigError);
}

// Exercises the shared library through the public header only.
#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "gainscope/gainscope.h"

namespace {

const char* kSystem = R"(
[dims]
n, m, p, ntheta = 1, 1, 1, 2
[A]
-3 + t1 + t2
[B]
-1 + t2
[C]
2 - t1
[D]
0
[nominal]
theta_star = 0, 0
[domain]
g1 = -(t1 + 1.5)*(t1 - 1.5)
g2 = -(t2 + 1)*(t2 - 1)
)";

struct Sys {
  gs_system* s = nullptr;
  Sys() { EXPECT_EQ(gs_system_load_text(kSystem, &s), GS_OK) << gs_last_error(); }
  ~Sys() { gs_system_free(s); }
};

std::filesystem::path tmpdir() {
  auto d = std::filesystem::temp_directory_path() / ("gs_capi_" + std::to_string(::getpid()));
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace

TEST(CApi, VersionAndStrings) {
  EXPECT_STREQ(gs_version(), "1.0.0");
  EXPECT_STREQ(gs_status_string(GS_ERR_PARSE), "parse error");
  gs_kind k;
  EXPECT_EQ(gs_kind_parse("s2o-lower", &k), GS_OK);
  EXPECT_EQ(k, GS_KIND_S2O_LOWER);
  EXPECT_STREQ(gs_kind_string(GS_KIND_H2), "h2");
  EXPECT_EQ(gs_kind_parse("nope", &k), GS_ERR_INVALID_ARG);
}

TEST(CApi, SystemQueries) {
  Sys h;
  int n, m, p, k;
  ASSERT_EQ(gs_system_dims(h.s, &n, &m, &p, &k), GS_OK);
  EXPECT_EQ(n + m + p + k, 5);
  double lo[2], hi[2];
  ASSERT_EQ(gs_system_box(h.s, lo, hi, 2), GS_OK);
  EXPECT_DOUBLE_EQ(lo[0], -1.5);
  EXPECT_DOUBLE_EQ(hi[1], 1.0);
  size_t need = 0;
  EXPECT_EQ(gs_system_serialize(h.s, nullptr, 0, &need), GS_OK);
  std::string buf(need, '\0');
  EXPECT_EQ(gs_system_serialize(h.s, buf.data(), buf.size(), &need), GS_OK);
  gs_system* again = nullptr;
  ASSERT_EQ(gs_system_load_text(buf.c_str(), &again), GS_OK);
  EXPECT_EQ(gs_system_hash(again), gs_system_hash(h.s));
  gs_system_free(again);
  double worst;
  int stable;
  ASSERT_EQ(gs_system_hurwitz_check(h.s, 5, &worst, &stable), GS_OK);
  EXPECT_TRUE(stable);
  EXPECT_NEAR(worst, -0.5, 1e-12);
}

TEST(CApi, ErrorsAreReported) {
  gs_system* s = nullptr;
  EXPECT_EQ(gs_system_load_file("/nonexistent/x.sys", &s), GS_ERR_IO);
  EXPECT_NE(std::string(gs_last_error()).find("nonexistent"), std::string::npos);
  EXPECT_EQ(gs_system_load_text("[dims]\nn = 1\n", &s), GS_ERR_PARSE);
  EXPECT_EQ(s, nullptr);
  EXPECT_EQ(gs_system_load_text(nullptr, &s), GS_ERR_INVALID_ARG);
  EXPECT_EQ(gs_system_dims(nullptr, nullptr, nullptr, nullptr, nullptr), GS_ERR_INVALID_ARG);
  Sys h;
  double out;
  const double bad[2] = {2.0, 1.5};
  EXPECT_EQ(gs_oracle(h.s, GS_KIND_L2, bad, 2, 0, &out), GS_ERR_SINGULAR);
  const double ok[2] = {1.0, 0.0};
  EXPECT_EQ(gs_oracle(h.s, GS_KIND_L2, ok, 1, 0, &out), GS_ERR_INVALID_ARG);
  char small[4];
  size_t need = 0;
  EXPECT_EQ(gs_system_serialize(h.s, small, sizeof small, &need), GS_ERR_INVALID_ARG);
  EXPECT_GT(need, sizeof small);
}

TEST(CApi, OracleAndInvariance) {
  Sys h;
  const double th[2] = {1.0, 0.0};
  double g;
  ASSERT_EQ(gs_oracle(h.s, GS_KIND_H2, th, 2, 0, &g), GS_OK);
  EXPECT_NEAR(g, 7.0 / 60.0, 1e-10);
  gs_invariance inv;
  const double fixed[2] = {1.0, -1.0};
  ASSERT_EQ(gs_invariance_eval(h.s, fixed, 2, 0, 1e-9, &inv), GS_OK);
  EXPECT_TRUE(inv.fully_invariant);
  EXPECT_EQ(gs_invariance_eval(h.s, fixed, 2, 3, 1e-9, &inv), GS_ERR_INVALID_ARG);
}

TEST(CApi, SynthesizeWriteReadCertify) {
  Sys h;
  gs_options o;
  gs_options_default(&o);
  gs_bound* b = nullptr;
  ASSERT_EQ(gs_bound_synthesize(h.s, GS_KIND_L2, &o, &b), GS_OK) << gs_last_error();
  EXPECT_EQ(gs_bound_solver_status(b), GS_SOLVER_OPTIMAL);
  EXPECT_TRUE(gs_bound_valid(b));
  const double star[2] = {0, 0};
  double v;
  ASSERT_EQ(gs_bound_eval(b, star, 2, &v), GS_OK);
  EXPECT_NEAR(v, 0.46157, 1e-4);
  int rows, blocks, largest;
  ASSERT_EQ(gs_bound_sdp_size(b, &rows, &blocks, &largest), GS_OK);
  EXPECT_GT(rows, 0);

  auto dir = tmpdir();
  const std::string path = (dir / "l2.cert").string();
  ASSERT_EQ(gs_certificate_write(gs_bound_certificate(b), path.c_str()), GS_OK);
  gs_certificate* c = nullptr;
  ASSERT_EQ(gs_certificate_read(path.c_str(), &c), GS_OK);
  EXPECT_TRUE(gs_certificate_valid(c));
  double cv;
  ASSERT_EQ(gs_certificate_eval(c, star, 2, &cv), GS_OK);
  EXPECT_DOUBLE_EQ(cv, v);
  size_t need;
  char kind[16];
  ASSERT_EQ(gs_certificate_meta(c, "kind", kind, sizeof kind, &need), GS_OK);
  EXPECT_STREQ(kind, "l2");
  EXPECT_EQ(gs_certificate_meta(c, "no-such-key", kind, sizeof kind, &need), GS_ERR_INVALID_ARG);

  gs_certify_report rep;
  char reason[128];
  ASSERT_EQ(gs_certify(c, h.s, 1, 10, &rep, reason, sizeof reason, &need), GS_OK);
  EXPECT_TRUE(rep.valid && rep.hash_matches && rep.dominance_ok) << reason;

  int n = 0;
  const int res[2] = {3, 3};
  const std::string csv = (dir / "sweep.csv").string();
  ASSERT_EQ(gs_sweep_write(h.s, c, res, 2, csv.c_str(), &n), GS_OK);
  EXPECT_EQ(n, 9);
  EXPECT_EQ(gs_sweep_write(h.s, c, res, 1, csv.c_str(), &n), GS_ERR_INVALID_ARG);
  const std::string lvl = (dir / "level.csv").string();
  ASSERT_EQ(gs_levelset_write(h.s, c, res, 2, 0.1, lvl.c_str(), &n), GS_OK);
  EXPECT_EQ(n, 0);  // constant bound above the level everywhere

  gs_certificate_free(c);
  gs_bound_free(b);
  std::filesystem::remove_all(dir);
}

TEST(CApi, TamperedCertificateIsInvalid) {
  Sys h;
  gs_options o;
  gs_options_default(&o);
  gs_bound* b = nullptr;
  ASSERT_EQ(gs_bound_synthesize(h.s, GS_KIND_L2, &o, &b), GS_OK);
  auto dir = tmpdir();
  const std::string path = (dir / "t.cert").string();
  ASSERT_EQ(gs_certificate_write(gs_bound_certificate(b), path.c_str()), GS_OK);
  gs_bound_free(b);

  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  // first Gram row: perturb its leading entry
  auto pos = text.find("\nq ");
  ASSERT_NE(pos, std::string::npos);
  auto start = pos + 3, end = text.find(' ', start);
  const double val = std::stod(text.substr(start, end - start)) + 1e-3;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", val);
  text.replace(start, end - start, buf);
  std::ofstream(path) << text;

  gs_certificate* c = nullptr;
  ASSERT_EQ(gs_certificate_read(path.c_str(), &c), GS_OK);
  EXPECT_FALSE(gs_certificate_valid(c));
  size_t need;
  char reason[256];
  gs_certificate_reason(c, reason, sizeof reason, &need);
  EXPECT_NE(std::string(reason).find("coeff"), std::string::npos) << reason;
  gs_certificate_free(c);
  std::filesystem::remove_all(dir);
}

TEST(CApi, H2FeedthroughIsAPreconditionError) {
  std::string text = kSystem;
  text.replace(text.find("[D]\n0"), 5, "[D]\nt1");
  gs_system* s = nullptr;
  ASSERT_EQ(gs_system_load_text(text.c_str(), &s), GS_OK);
  gs_options o;
  gs_options_default(&o);
  gs_bound* b = nullptr;
  EXPECT_EQ(gs_bound_synthesize(s, GS_KIND_H2, &o, &b), GS_ERR_PRECONDITION);
  EXPECT_EQ(b, nullptr);
  EXPECT_NE(std::string(gs_last_error()).find("feedthrough"), std::string::npos);
  gs_system_free(s);
}

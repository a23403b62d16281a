#include "pfocus/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pfocus/errors.hpp"

namespace pfocus {

namespace {

// Hairer & Wanner, DOP853 tableau
constexpr double c2 = 0.526001519587677318785587544488e-01, c3 = 0.789002279381515978178381316732e-01,
                 c4 = 0.118350341907227396726757197510e+00, c5 = 0.281649658092772603273242802490e+00,
                 c6 = 0.333333333333333333333333333333e+00, c7 = 0.25e+00, c8 = 0.307692307692307692307692307692e+00,
                 c9 = 0.651282051282051282051282051282e+00, c10 = 0.6e+00, c11 = 0.857142857142857142857142857142e+00,
                 c14 = 0.1e+00, c15 = 0.2e+00, c16 = 0.777777777777777777777777777778e+00;

constexpr double b1 = 5.42937341165687622380535766363e-2, b6 = 4.45031289275240888144113950566e0,
                 b7 = 1.89151789931450038304281599044e0, b8 = -5.8012039600105847814672114227e0,
                 b9 = 3.1116436695781989440891606237e-1, b10 = -1.52160949662516078556178806805e-1,
                 b11 = 2.01365400804030348374776537501e-1, b12 = 4.47106157277725905176885569043e-2;

constexpr double bhh1 = 0.244094488188976377952755905512e+00, bhh2 = 0.733846688281611857341361741547e+00,
                 bhh3 = 0.220588235294117647058823529412e-01;

constexpr double er1 = 0.1312004499419488073250102996e-01, er6 = -0.1225156446376204440720569753e+01,
                 er7 = -0.4957589496572501915214079952e+00, er8 = 0.1664377182454986536961530415e+01,
                 er9 = -0.3503288487499736816886487290e+00, er10 = 0.3341791187130174790297318841e+00,
                 er11 = 0.8192320648511571246570742613e-01, er12 = -0.2235530786388629525884427845e-01;

constexpr double a21 = 5.26001519587677318785587544488e-2, a31 = 1.97250569845378994544595329183e-2,
                 a32 = 5.91751709536136983633785987549e-2, a41 = 2.95875854768068491816892993775e-2,
                 a43 = 8.87627564304205475450678981324e-2, a51 = 2.41365134159266685502369798665e-1,
                 a53 = -8.84549479328286085344864962717e-1, a54 = 9.24834003261792003115737966543e-1,
                 a61 = 3.7037037037037037037037037037e-2, a64 = 1.70828608729473871279604482173e-1,
                 a65 = 1.25467687566822425016691814123e-1, a71 = 3.7109375e-2,
                 a74 = 1.70252211019544039314978060272e-1, a75 = 6.02165389804559606850219397283e-2,
                 a76 = -1.7578125e-2, a81 = 3.70920001185047927108779319836e-2,
                 a84 = 1.70383925712239993810214054705e-1, a85 = 1.07262030446373284651809199168e-1,
                 a86 = -1.53194377486244017527936158236e-2, a87 = 8.27378916381402288758473766002e-3,
                 a91 = 6.24110958716075717114429577812e-1, a94 = -3.36089262944694129406857109825e0,
                 a95 = -8.68219346841726006818189891453e-1, a96 = 2.75920996994467083049415600797e1,
                 a97 = 2.01540675504778934086186788979e1, a98 = -4.34898841810699588477366255144e1,
                 a101 = 4.77662536438264365890433908527e-1, a104 = -2.48811461997166764192642586468e0,
                 a105 = -5.90290826836842996371446475743e-1, a106 = 2.12300514481811942347288949897e1,
                 a107 = 1.52792336328824235832596922938e1, a108 = -3.32882109689848629194453265587e1,
                 a109 = -2.03312017085086261358222928593e-2, a111 = -9.3714243008598732571704021658e-1,
                 a114 = 5.18637242884406370830023853209e0, a115 = 1.09143734899672957818500254654e0,
                 a116 = -8.14978701074692612513997267357e0, a117 = -1.85200656599969598641566180701e1,
                 a118 = 2.27394870993505042818970056734e1, a119 = 2.49360555267965238987089396762e0,
                 a1110 = -3.0467644718982195003823669022e0, a121 = 2.27331014751653820792359768449e0,
                 a124 = -1.05344954667372501984066689879e1, a125 = -2.00087205822486249909675718444e0,
                 a126 = -1.79589318631187989172765950534e1, a127 = 2.79488845294199600508499808837e1,
                 a128 = -2.85899827713502369474065508674e0, a129 = -8.87285693353062954433549289258e0,
                 a1210 = 1.23605671757943030647266201528e1, a1211 = 6.43392746015763530355970484046e-1;

constexpr double a141 = 5.61675022830479523392909219681e-2, a147 = 2.53500210216624811088794765333e-1,
                 a148 = -2.46239037470802489917441475441e-1, a149 = -1.24191423263816360469010140626e-1,
                 a1410 = 1.5329179827876569731206322685e-1, a1411 = 8.20105229563468988491666602057e-3,
                 a1412 = 7.56789766054569976138603589584e-3, a1413 = -8.298e-3,
                 a151 = 3.18346481635021405060768473261e-2, a156 = 2.83009096723667755288322961402e-2,
                 a157 = 5.35419883074385676223797384372e-2, a158 = -5.49237485713909884646569340306e-2,
                 a1511 = -1.08347328697249322858509316994e-4, a1512 = 3.82571090835658412954920192323e-4,
                 a1513 = -3.40465008687404560802977114492e-4, a1514 = 1.41312443674632500278074618366e-1,
                 a161 = -4.28896301583791923408573538692e-1, a166 = -4.69762141536116384314449447206e0,
                 a167 = 7.68342119606259904184240953878e0, a168 = 4.06898981839711007970213554331e0,
                 a169 = 3.56727187455281109270669543021e-1, a1613 = -1.39902416515901462129418009734e-3,
                 a1614 = 2.9475147891527723389556272149e0, a1615 = -9.15095847217987001081870187138e0;

constexpr double d41 = -0.84289382761090128651353491142e+01, d46 = 0.56671495351937776962531783590e+00,
                 d47 = -0.30689499459498916912797304727e+01, d48 = 0.23846676565120698287728149680e+01,
                 d49 = 0.21170345824450282767155149946e+01, d410 = -0.87139158377797299206789907490e+00,
                 d411 = 0.22404374302607882758541771650e+01, d412 = 0.63157877876946881815570249290e+00,
                 d413 = -0.88990336451333310820698117400e-01, d414 = 0.18148505520854727256656404962e+02,
                 d415 = -0.91946323924783554000451984436e+01, d416 = -0.44360363875948939664310572000e+01,
                 d51 = 0.10427508642579134603413151009e+02, d56 = 0.24228349177525818288430175319e+03,
                 d57 = 0.16520045171727028198505394887e+03, d58 = -0.37454675472269020279518312152e+03,
                 d59 = -0.22113666853125306036270938578e+02, d510 = 0.77334326684722638389603898808e+01,
                 d511 = -0.30674084731089398182061213626e+02, d512 = -0.93321305264302278729567221706e+01,
                 d513 = 0.15697238121770843886131091075e+02, d514 = -0.31139403219565177677282850411e+02,
                 d515 = -0.93529243588444783865713862664e+01, d516 = 0.35816841486394083752465898540e+02,
                 d61 = 0.19985053242002433820987653617e+02, d66 = -0.38703730874935176555105901742e+03,
                 d67 = -0.18917813819516756882830838328e+03, d68 = 0.52780815920542364900561016686e+03,
                 d69 = -0.11573902539959630126141871134e+02, d610 = 0.68812326946963000169666922661e+01,
                 d611 = -0.10006050966910838403183860980e+01, d612 = 0.77771377980534432092869265740e+00,
                 d613 = -0.27782057523535084065932004339e+01, d614 = -0.60196695231264120758267380846e+02,
                 d615 = 0.84320405506677161018159903784e+02, d616 = 0.11992291136182789328035130030e+02,
                 d71 = -0.25693933462703749003312586129e+02, d76 = -0.15418974869023643374053993627e+03,
                 d77 = -0.23152937917604549567536039109e+03, d78 = 0.35763911791061412378285349910e+03,
                 d79 = 0.93405324183624310003907691704e+02, d710 = -0.37458323136451633156875139351e+02,
                 d711 = 0.10409964950896230045147246184e+03, d712 = 0.29840293426660503123344363579e+02,
                 d713 = -0.43533456590011143754432175058e+02, d714 = 0.96324553959188282948394950600e+02,
                 d715 = -0.39177261675615439165231486172e+02, d716 = -0.14972683625798562581422125276e+03;

Vec2 axpy(const Vec2& y, double h, std::initializer_list<std::pair<double, const Vec2*>> terms) {
  Vec2 s{0, 0};
  for (const auto& [c, k] : terms) {
    s[0] += c * (*k)[0];
    s[1] += c * (*k)[1];
  }
  return {y[0] + h * s[0], y[1] + h * s[1]};
}

double sk(double a, double b, const OdeOptions& o) { return o.atol + o.rtol * std::max(std::abs(a), std::abs(b)); }

}  // namespace

Dop853::Dop853(Rhs f, Vec2 y0, double t0, int direction, const OdeOptions& opt)
    : f_(std::move(f)), opt_(opt), dir_(direction >= 0 ? 1 : -1), t_(t0), t_old_(t0), y_(y0), y_old_(y0) {
  if (!(opt_.rtol > 0) || !(opt_.atol > 0)) throw Error(ErrorCode::InvalidInput, "tolerances must be positive");
  k1_ = f_(y_);
  cont_[0] = y_;
  h_ = opt_.initial_step > 0 ? opt_.initial_step : 0.0;
  if (h_ == 0.0) initial_step();
  if (opt_.max_step > 0) h_ = std::min(h_, opt_.max_step);
}

void Dop853::initial_step() {
  double dnf = 0, dny = 0;
  for (int i = 0; i < 2; ++i) {
    const double s = opt_.atol + opt_.rtol * std::abs(y_[i]);
    dnf += (k1_[i] / s) * (k1_[i] / s);
    dny += (y_[i] / s) * (y_[i] / s);
  }
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
  if (opt_.max_step > 0) h = std::min(h, opt_.max_step);
  const Vec2 y1{y_[0] + dir_ * h * k1_[0], y_[1] + dir_ * h * k1_[1]};
  const Vec2 f1 = f_(y1);
  double der2 = 0;
  for (int i = 0; i < 2; ++i) {
    const double s = opt_.atol + opt_.rtol * std::abs(y_[i]);
    der2 += ((f1[i] - k1_[i]) / s) * ((f1[i] - k1_[i]) / s);
  }
  der2 = std::sqrt(der2) / h;
  const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
  const double h1 = der12 <= 1e-15 ? std::max(1e-6, std::abs(h) * 1e-3) : std::pow(0.01 / der12, 1.0 / 8);
  h_ = std::min(100 * std::abs(h), h1);
}

void Dop853::step(const double* t_limit) {
  const OdeOptions& o = opt_;
  for (int attempt = 0;; ++attempt) {
    if (accepted_ + rejected_ >= o.max_steps) {
      throw Error(ErrorCode::NoCrossing, "integrator exceeded " + std::to_string(o.max_steps) + " steps");
    }
    double hmag = h_;
    bool clipped = false;
    if (t_limit) {
      const double room = (*t_limit - t_) * dir_;
      if (room <= 0) throw std::logic_error("Dop853::step called at its time limit");
      if (hmag >= room) {
        hmag = room;
        clipped = true;
      }
    }
    if (hmag < 1e-15 * std::max(1.0, std::abs(t_))) {
      std::ostringstream os;
      os << "step size underflow at t=" << t_;
      throw Error(ErrorCode::NoCrossing, os.str());
    }
    const double h = dir_ * hmag;
    const Vec2& y = y_;
    const Vec2& k1 = k1_;
    const Vec2 k2 = f_(axpy(y, h, {{a21, &k1}}));
    const Vec2 k3 = f_(axpy(y, h, {{a31, &k1}, {a32, &k2}}));
    const Vec2 k4 = f_(axpy(y, h, {{a41, &k1}, {a43, &k3}}));
    const Vec2 k5 = f_(axpy(y, h, {{a51, &k1}, {a53, &k3}, {a54, &k4}}));
    const Vec2 k6 = f_(axpy(y, h, {{a61, &k1}, {a64, &k4}, {a65, &k5}}));
    const Vec2 k7 = f_(axpy(y, h, {{a71, &k1}, {a74, &k4}, {a75, &k5}, {a76, &k6}}));
    const Vec2 k8 = f_(axpy(y, h, {{a81, &k1}, {a84, &k4}, {a85, &k5}, {a86, &k6}, {a87, &k7}}));
    const Vec2 k9 = f_(axpy(y, h, {{a91, &k1}, {a94, &k4}, {a95, &k5}, {a96, &k6}, {a97, &k7}, {a98, &k8}}));
    const Vec2 k10 =
        f_(axpy(y, h, {{a101, &k1}, {a104, &k4}, {a105, &k5}, {a106, &k6}, {a107, &k7}, {a108, &k8}, {a109, &k9}}));
    const Vec2 k11 = f_(axpy(
        y, h, {{a111, &k1}, {a114, &k4}, {a115, &k5}, {a116, &k6}, {a117, &k7}, {a118, &k8}, {a119, &k9}, {a1110, &k10}}));
    const Vec2 k12 = f_(axpy(y, h,
                             {{a121, &k1}, {a124, &k4}, {a125, &k5}, {a126, &k6}, {a127, &k7}, {a128, &k8}, {a129, &k9},
                              {a1210, &k10}, {a1211, &k11}}));
    Vec2 slope;
    for (int i = 0; i < 2; ++i)
      slope[i] = b1 * k1[i] + b6 * k6[i] + b7 * k7[i] + b8 * k8[i] + b9 * k9[i] + b10 * k10[i] + b11 * k11[i] +
                 b12 * k12[i];
    const Vec2 ynew{y[0] + h * slope[0], y[1] + h * slope[1]};

    double err = 0, err2 = 0;
    for (int i = 0; i < 2; ++i) {
      const double s = sk(y[i], ynew[i], o);
      const double e2 = slope[i] - bhh1 * k1[i] - bhh2 * k9[i] - bhh3 * k12[i];
      const double e5 = er1 * k1[i] + er6 * k6[i] + er7 * k7[i] + er8 * k8[i] + er9 * k9[i] + er10 * k10[i] +
                        er11 * k11[i] + er12 * k12[i];
      err += (e5 / s) * (e5 / s);
      err2 += (e2 / s) * (e2 / s);
    }
    double deno = err + 0.01 * err2;
    if (deno <= 0) deno = 1;
    err = hmag * err * std::sqrt(1.0 / (2 * deno));
    if (!std::isfinite(err)) err = 1e10;

    const double fac11 = std::pow(err, 0.125);
    if (err <= 1.0) {
      const Vec2 knew = f_(ynew);
      // continuous extension
      for (int i = 0; i < 2; ++i) {
        cont_[0][i] = y[i];
        const double ydiff = ynew[i] - y[i];
        cont_[1][i] = ydiff;
        const double bspl = h * k1[i] - ydiff;
        cont_[2][i] = bspl;
        cont_[3][i] = ydiff - h * knew[i] - bspl;
        cont_[4][i] = d41 * k1[i] + d46 * k6[i] + d47 * k7[i] + d48 * k8[i] + d49 * k9[i] + d410 * k10[i] +
                      d411 * k11[i] + d412 * k12[i];
        cont_[5][i] = d51 * k1[i] + d56 * k6[i] + d57 * k7[i] + d58 * k8[i] + d59 * k9[i] + d510 * k10[i] +
                      d511 * k11[i] + d512 * k12[i];
        cont_[6][i] = d61 * k1[i] + d66 * k6[i] + d67 * k7[i] + d68 * k8[i] + d69 * k9[i] + d610 * k10[i] +
                      d611 * k11[i] + d612 * k12[i];
        cont_[7][i] = d71 * k1[i] + d76 * k6[i] + d77 * k7[i] + d78 * k8[i] + d79 * k9[i] + d710 * k10[i] +
                      d711 * k11[i] + d712 * k12[i];
      }
      const Vec2 k14 = f_(axpy(y, h,
                               {{a141, &k1}, {a147, &k7}, {a148, &k8}, {a149, &k9}, {a1410, &k10}, {a1411, &k11},
                                {a1412, &k12}, {a1413, &knew}}));
      const Vec2 k15 = f_(axpy(y, h,
                               {{a151, &k1}, {a156, &k6}, {a157, &k7}, {a158, &k8}, {a1511, &k11}, {a1512, &k12},
                                {a1513, &knew}, {a1514, &k14}}));
      const Vec2 k16 = f_(axpy(y, h,
                               {{a161, &k1}, {a166, &k6}, {a167, &k7}, {a168, &k8}, {a169, &k9}, {a1613, &knew},
                                {a1614, &k14}, {a1615, &k15}}));
      for (int i = 0; i < 2; ++i) {
        cont_[4][i] = h * (cont_[4][i] + d413 * knew[i] + d414 * k14[i] + d415 * k15[i] + d416 * k16[i]);
        cont_[5][i] = h * (cont_[5][i] + d513 * knew[i] + d514 * k14[i] + d515 * k15[i] + d516 * k16[i]);
        cont_[6][i] = h * (cont_[6][i] + d613 * knew[i] + d614 * k14[i] + d615 * k15[i] + d616 * k16[i]);
        cont_[7][i] = h * (cont_[7][i] + d713 * knew[i] + d714 * k14[i] + d715 * k15[i] + d716 * k16[i]);
      }
      t_old_ = t_;
      y_old_ = y_;
      t_ = clipped ? *t_limit : t_ + h;
      y_ = ynew;
      k1_ = knew;
      ++accepted_;
      double fac = fac11 / 0.9;
      fac = std::max(1.0 / 6.0, std::min(1.0 / 0.333, fac));
      double hnew = hmag / fac;
      if (last_rejected_) hnew = std::min(hnew, hmag);
      if (o.max_step > 0) hnew = std::min(hnew, o.max_step);
      // a clipped step says nothing about the natural step size
      h_ = clipped ? std::max(hnew, h_) : hnew;
      last_rejected_ = false;
      return;
    }
    h_ = hmag / std::min(1.0 / 0.333, fac11 / 0.9);
    last_rejected_ = true;
    ++rejected_;
  }
}

Vec2 Dop853::dense(double t) const {
  const double h = t_ - t_old_;
  const double s = h == 0 ? 0.0 : (t - t_old_) / h;
  const double s1 = 1.0 - s;
  Vec2 out;
  for (int i = 0; i < 2; ++i) {
    const double conpar = cont_[4][i] + s * (cont_[5][i] + s1 * (cont_[6][i] + s * cont_[7][i]));
    out[i] = cont_[0][i] + s * (cont_[1][i] + s1 * (cont_[2][i] + s * (cont_[3][i] + s1 * conpar)));
  }
  return out;
}

Vec2 integrate(const Rhs& f, Vec2 y0, double T, const OdeOptions& opt) {
  if (T == 0) return y0;
  Dop853 solver(f, y0, 0.0, T > 0 ? 1 : -1, opt);
  while (solver.t() != T) solver.step(&T);
  return solver.y();
}

}  // namespace pfocus

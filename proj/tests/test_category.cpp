#include <doctest.h>

#include <crs/category.hpp>
#include <crs/errors.hpp>
#include <crs/structures.hpp>

#include <random>
#include <vector>

#include "support/gen.hpp"

using namespace crs;
using namespace crs::testing;

namespace {

Space raySp() { return Space::ray("r0"); }

CoarseSpace metricRayCS() { return CoarseSpace::of(StructureDescr::metricDiscrete(raySp())); }

CoarseSpace terminalRayCS() { return CoarseSpace::of(StructureDescr::terminal(raySp())); }

CoarseSpace idealOriginCS() {
    Space sp = raySp();
    return CoarseSpace::of(StructureDescr::ideal(
        StructureDescr::metricDiscrete(sp), PointSet::ofRay(sp, "r0", UPSet::single(0))));
}

EAMap idOn(const Space& sp) { return EAMap::identity(sp); }

// i -> i + k on the single ray of sp.
EAMap shiftUp(const Space& sp, std::int64_t k) {
    return EAMap::affine(sp, sp, "r0", 1, k, "r0");
}

// 0 -> 0, i -> i - 1.
EAMap shiftDown(const Space& sp) {
    return EAMap::make(sp, sp, {},
                       {{"r0", RayRule{{Point{"r0", 0}}, AffineTail{1, -1, "r0"}}}});
}

EAMap doubling(const Space& sp) { return EAMap::affine(sp, sp, "r0", 2, 0, "r0"); }

EAMap constAt(const Space& src, const Space& dst, const Point& v) {
    return EAMap::constant(src, dst, v);
}

PointSet evens(const Space& sp) { return PointSet::ofRay(sp, "r0", UPSet::evens()); }

PointSet origin(const Space& sp) { return PointSet::ofRay(sp, "r0", UPSet::single(0)); }

}  // namespace

TEST_CASE("identity maps are coarse") {
    for (const CoarseSpace& X :
         {metricRayCS(), terminalRayCS(), idealOriginCS(),
          CoarseSpace::of(StructureDescr::initialConnected(raySp()))}) {
        ArrowCheck c = checkCoarse(idOn(X.space), X, X);
        CHECK(c.locallyProper.in());
        CHECK(c.preserves.in());
        CHECK(c.coarse());
        CHECK(c.overall().in());
    }
}

TEST_CASE("constant map from a metric ray fails local properness") {
    CoarseSpace X = metricRayCS();
    ArrowCheck c = checkCoarse(constAt(X.space, X.space, {"r0", 0}), X, X);
    CHECK(c.locallyProper.out());
    CHECK_FALSE(c.coarse());
}

TEST_CASE("constant map from the ideal at the origin is coarse") {
    CoarseSpace Y = idealOriginCS();
    Space pt = Space::point("p0");
    CoarseSpace X = CoarseSpace::of(StructureDescr::terminal(pt));
    ArrowCheck c = checkCoarse(constAt(Y.space, pt, {"p0", 0}), Y, X);
    CHECK(c.coarse());
}

TEST_CASE("doubling is coarse on the metric ray") {
    CoarseSpace X = metricRayCS();
    CHECK(checkCoarse(doubling(X.space), X, X).coarse());
}

TEST_CASE("identity from the terminal ray into the metric ray is not coarse") {
    ArrowCheck c = checkCoarse(idOn(raySp()), terminalRayCS(), metricRayCS());
    CHECK(c.locallyProper.in());
    CHECK(c.preserves.out());
    // The separating member is necessarily a sheared probe: every band image
    // has bounded width.
    CHECK_FALSE(c.preserves.shearWitness.empty());
}

TEST_CASE("closeness is reflexive and tolerates unit shifts") {
    CoarseSpace X = metricRayCS();
    CHECK(checkClose(idOn(X.space), idOn(X.space), X, X).in());
    CHECK(checkClose(idOn(X.space), shiftUp(X.space, 1), X, X).in());
    // The displayed displacement of the shifted diagonal is exactly 1.
    Verdict unit = containsPair(X.structure, idOn(X.space), shiftUp(X.space, 1),
                                Relation::fullUnit(X.space));
    REQUIRE(unit.in());
    CHECK(unit.detail.at("bound").get<std::uint64_t>() == 1);
    // Doubling drifts linearly away from the identity.
    CHECK(checkClose(idOn(X.space), doubling(X.space), X, X).out());
}

TEST_CASE("closeness requires coarse arguments") {
    CoarseSpace X = metricRayCS();
    CHECK_THROWS_AS(checkClose(constAt(X.space, X.space, {"r0", 0}), idOn(X.space), X, X),
                    NotCoarse);
}

TEST_CASE("any two coarse maps into a terminal structure are close") {
    std::mt19937_64 rng(101);
    Space sp = mixedSpace();
    CoarseSpace Y = CoarseSpace::of(StructureDescr::metricDiscrete(sp));
    CoarseSpace X = CoarseSpace::of(StructureDescr::terminal(sp));
    int checked = 0;
    for (int i = 0; i < 40; ++i) {
        EAMap f = randomProperMap(rng, sp, sp);
        EAMap g = randomProperMap(rng, sp, sp);
        if (!checkCoarse(f, Y, X).coarse() || !checkCoarse(g, Y, X).coarse()) continue;
        CHECK(checkClose(f, g, Y, X).in());
        ++checked;
    }
    CHECK(checked >= 20);
}

TEST_CASE("closeness behaves like an equivalence on samples") {
    std::mt19937_64 rng(103);
    Space sp = raySp();
    CoarseSpace X = metricRayCS();
    std::vector<EAMap> maps;
    for (int k = 0; k <= 2; ++k) maps.push_back(shiftUp(sp, k));
    maps.push_back(shiftDown(sp));
    maps.push_back(doubling(sp));
    for (const EAMap& f : maps)
        for (const EAMap& g : maps) {
            Verdict fg = checkClose(f, g, X, X);
            Verdict gf = checkClose(g, f, X, X);
            CHECK(fg.state == gf.state);  // symmetry
        }
    // Transitivity on the close cluster of shifts.
    CHECK(checkClose(maps[0], maps[1], X, X).in());
    CHECK(checkClose(maps[1], maps[2], X, X).in());
    CHECK(checkClose(maps[0], maps[2], X, X).in());
}

TEST_CASE("composition of coarse maps is coarse") {
    std::mt19937_64 rng(107);
    Space sp = raySp();
    CoarseSpace X = metricRayCS();
    int checked = 0;
    for (int i = 0; i < 25; ++i) {
        EAMap f = randomProperMap(rng, sp, sp);
        EAMap g = randomProperMap(rng, sp, sp);
        if (!checkCoarse(f, X, X).coarse() || !checkCoarse(g, X, X).coarse()) continue;
        CHECK(checkCoarse(composeMaps(g, f), X, X).coarse());
        ++checked;
    }
    CHECK(checked >= 10);
}

TEST_CASE("closeness is a congruence under composition") {
    Space sp = raySp();
    CoarseSpace X = metricRayCS();
    EAMap f = shiftUp(sp, 0), fp = shiftUp(sp, 2);
    EAMap g = shiftUp(sp, 1), gp = shiftDown(sp);
    REQUIRE(checkClose(f, fp, X, X).in());
    REQUIRE(checkClose(g, gp, X, X).in());
    CHECK(checkClose(composeMaps(g, f), composeMaps(gp, fp), X, X).in());
}

TEST_CASE("coproduct keeps membership summand-local") {
    Space a = Space::ray("a"), b = Space::ray("b");
    CoarseSpace A = CoarseSpace::of(StructureDescr::metricDiscrete(a));
    CoarseSpace B = CoarseSpace::of(StructureDescr::metricDiscrete(b));
    CoproductResult cp = coproduct({A, B});
    REQUIRE(cp.object.space.size() == 2);
    REQUIRE(cp.injections.size() == 2);
    CHECK(contains(cp.object.structure,
                   Relation::band(cp.object.space, "a", "a", 1, UPSet::all()))
              .in());
    CHECK(contains(cp.object.structure,
                   Relation::band(cp.object.space, "a", "b", 0, UPSet::all()))
              .out());
    CHECK(checkCoarse(cp.injections[0], A, cp.object).coarse());
    CHECK(checkCoarse(cp.injections[1], B, cp.object).coarse());
}

TEST_CASE("degenerate coproducts") {
    CoarseSpace X = metricRayCS();
    CoproductResult one = coproduct({X});
    CHECK(one.object.structure == X.structure);
    CHECK(sameMap(one.injections[0], idOn(X.space)));
    CoproductResult zero = coproduct({});
    CHECK(zero.object.space.size() == 0);
    // Colliding component ids are renamed apart.
    CoproductResult two = coproduct({X, X});
    CHECK(two.object.space.size() == 2);
    CHECK(checkCoarse(two.injections[1], X, two.object).coarse());
}

TEST_CASE("maps out of a coproduct are determined by their components") {
    Space a = Space::ray("a"), b = Space::ray("b");
    CoarseSpace A = CoarseSpace::of(StructureDescr::metricDiscrete(a));
    CoarseSpace B = CoarseSpace::of(StructureDescr::metricDiscrete(b));
    CoproductResult cp = coproduct({A, B});
    Space w = raySp();
    CoarseSpace W = metricRayCS();
    Cone cocone{W, {EAMap::affine(a, w, "a", 1, 0, "r0"), EAMap::affine(b, w, "b", 1, 3, "r0")}};
    ConeReport rep = verifyCone(cp, {A, B}, cocone);
    CHECK(rep.exists.in());
    CHECK(rep.unique.in());
    REQUIRE(rep.mediator.has_value());
    CHECK(checkCoarse(*rep.mediator, cp.object, W).coarse());
}

TEST_CASE("equalizer of identity and shift on the terminal ray is everything") {
    CoarseSpace T = terminalRayCS();
    EqualizerResult eq = equalizer(idOn(T.space), shiftUp(T.space, 1), T, T);
    CHECK(eq.carrier == PointSet::full(T.space));
    CHECK(structureEq(eq.object.structure, StructureDescr::terminal(T.space), 8).in());
    CHECK(checkCoarse(eq.inclusion, eq.object, T).coarse());
}

TEST_CASE("equalizer of a map with itself returns the source") {
    CoarseSpace X = metricRayCS();
    EqualizerResult eq = equalizer(idOn(X.space), idOn(X.space), X, X);
    CHECK(eq.carrier == PointSet::full(X.space));
    CHECK(structureEq(eq.object.structure, X.structure, 8).in());
}

TEST_CASE("equalizer of identity and doubling keeps only bounded members") {
    CoarseSpace X = metricRayCS();
    EqualizerResult eq = equalizer(idOn(X.space), doubling(X.space), X, X);
    // One cluster: every point is connected to its doubled image.
    CHECK(eq.carrier == PointSet::full(X.space));
    // The mixed image of an infinite band drifts apart linearly, so the band
    // is rejected.
    CHECK(contains(eq.object.structure,
                   Relation::band(X.space, "r0", "r0", 1, UPSet::all()))
              .out());
    CHECK(contains(eq.object.structure, Relation::localUnit(evens(X.space))).out());
    CHECK(contains(eq.object.structure,
                   Relation::band(X.space, "r0", "r0", 1, UPSet::range(0, 10)))
              .in());
    CHECK(contains(eq.object.structure,
                   Relation::localUnit(PointSet::ofRay(X.space, "r0", UPSet::range(0, 5))))
              .in());
}

TEST_CASE("equalizer requires coarse maps") {
    CoarseSpace X = metricRayCS();
    CHECK_THROWS_AS(
        equalizer(constAt(X.space, X.space, {"r0", 0}), idOn(X.space), X, X),
        NotCoarse);
}

TEST_CASE("equalizer cones factor through the carrier") {
    CoarseSpace T = terminalRayCS();
    EAMap f = idOn(T.space), g = shiftUp(T.space, 1);
    EqualizerResult eq = equalizer(f, g, T, T);
    CoarseSpace W = metricRayCS();
    Cone cone{W, {shiftUp(W.space, 2)}};
    ConeReport rep = verifyCone(eq, f, g, T, T, cone);
    CHECK(rep.exists.in());
    CHECK(rep.unique.in());
    REQUIRE(rep.mediator.has_value());
}

TEST_CASE("coequalizer of identity and the downward shift on the terminal ray") {
    CoarseSpace T = terminalRayCS();
    CoequalizerResult co = coequalizer(idOn(T.space), shiftDown(T.space), T, T);
    CHECK(structureEq(co.object.structure, StructureDescr::terminal(T.space), 8).in());
    CHECK(sameMap(co.map, idOn(T.space)));
}

TEST_CASE("coequalizer of a map with itself is the target") {
    CoarseSpace X = metricRayCS();
    CoequalizerResult co = coequalizer(idOn(X.space), idOn(X.space), X, X);
    CHECK(structureEq(co.object.structure, X.structure, 8).in());
}

TEST_CASE("coequalizer of identity and shift keeps the metric ray") {
    CoarseSpace X = metricRayCS();
    CoequalizerResult co = coequalizer(idOn(X.space), shiftUp(X.space, 1), X, X);
    CHECK(structureEq(co.object.structure, X.structure, 8).in());
}

TEST_CASE("coequalizer rejects sheared pushes") {
    CoarseSpace X = metricRayCS();
    CHECK_THROWS_AS(coequalizer(idOn(X.space), doubling(X.space), X, X), UnsupportedShear);
}

TEST_CASE("pushout along parallel identities collapses onto the base") {
    Space z = Space::ray("z"), x = Space::ray("x"), y = Space::ray("y");
    CoarseSpace Z = CoarseSpace::of(StructureDescr::metricDiscrete(z));
    CoarseSpace X = CoarseSpace::of(StructureDescr::metricDiscrete(x));
    CoarseSpace Y = CoarseSpace::of(StructureDescr::metricDiscrete(y));
    EAMap f = EAMap::affine(z, x, "z", 1, 0, "x");
    EAMap g = EAMap::affine(z, y, "z", 1, 0, "y");
    PushoutResult po = pushout(f, g, Z, X, Y);
    REQUIRE(po.object.space.size() == 2);
    // The two copies are glued along the diagonal push.
    CHECK(contains(po.object.structure,
                   Relation::band(po.object.space, "x", "y", 0, UPSet::all()))
              .in());
    // Collapse map back onto Z witnesses the coarse equivalence.
    EAMap collapse = EAMap::make(
        po.object.space, z, {},
        {{"x", RayRule{{}, AffineTail{1, 0, "z"}}}, {"y", RayRule{{}, AffineTail{1, 0, "z"}}}});
    EAMap intoPush = composeMaps(po.fromX, f);
    CHECK(equivalenceWitness(Z, po.object, intoPush, collapse).in());
}

TEST_CASE("quotient by a co-bounded set collapses the metric ray") {
    CoarseSpace X = metricRayCS();
    QuotientResult q = quotient(X, evens(X.space));
    CHECK(structureEq(q.object.structure, StructureDescr::terminal(X.space), 8).in());
    CHECK(isEpi(q.map, X, q.object).in());
}

TEST_CASE("quotient by a single point changes nothing") {
    CoarseSpace X = metricRayCS();
    QuotientResult q = quotient(X, origin(X.space));
    CHECK(structureEq(q.object.structure, X.structure, 8).in());
}

TEST_CASE("quotient needs a unital subspace") {
    CoarseSpace I = CoarseSpace::of(StructureDescr::initial(raySp()));
    CHECK_THROWS_AS(quotient(I, evens(I.space)), NotUnitalSubspace);
}

TEST_CASE("termination of a unital space is terminal") {
    CoarseSpace X = metricRayCS();
    CoarseSpace T = terminate(X);
    CHECK(structureEq(T.structure, StructureDescr::terminal(X.space), 8).in());
    CHECK(structureEq(terminate(T).structure, T.structure, 8).in());
    CHECK(checkCoarse(tau(X), X, T).coarse());
}

TEST_CASE("termination of the origin ideal keeps supports near the origin") {
    CoarseSpace X = idealOriginCS();
    CoarseSpace T = terminate(X);
    CHECK(contains(T.structure, Relation::fullUnit(X.space)).out());
    PointSet small = PointSet::ofRay(X.space, "r0", UPSet::range(0, 3));
    CHECK(contains(T.structure, Relation::rect(small, small)).in());
}

TEST_CASE("connect absorbs finite cross pieces and fixes connected spaces") {
    CoarseSpace M = metricRayCS();
    CHECK(structureEq(connect(M).structure, M.structure, 8).in());
    Space a = Space::ray("a"), b = Space::ray("b");
    CoproductResult cp = coproduct({CoarseSpace::of(StructureDescr::metricDiscrete(a)),
                                    CoarseSpace::of(StructureDescr::metricDiscrete(b))});
    CoarseSpace C = connect(cp.object);
    Relation crossPair = Relation::singlePair(cp.object.space, {"a", 3}, {"b", 7});
    CHECK(contains(cp.object.structure, crossPair).out());
    CHECK(contains(C.structure, crossPair).in());
}

TEST_CASE("adding a point attaches a connected basepoint") {
    CoarseSpace X = metricRayCS();
    AddPtResult r = addPt(X);
    CHECK(r.object.space.size() == 2);
    CHECK(connectedPts(r.object.structure, {"r0", 0}, r.added).in());
    CHECK(checkCoarse(r.inclusion, X, r.object).coarse());
}

TEST_CASE("terminated-factor product returns the plain factor") {
    CoarseSpace T = terminalRayCS();
    CoarseSpace Y = metricRayCS();
    TerminatedProductResult p = productWithTerminated(T, Y);
    CHECK(p.object.structure == Y.structure);
    CHECK(sameMap(p.projY, idOn(Y.space)));
    CHECK(checkCoarse(p.projT, Y, T).coarse());
    TerminatedProductResult self = productWithTerminated(T, T);
    CHECK(self.object.structure == T.structure);
}

TEST_CASE("terminated-factor product rejects unreachable targets") {
    CoarseSpace T = CoarseSpace::of(
        StructureDescr::termination(StructureDescr::terminal(Space::point("p0"))));
    CoarseSpace Y = metricRayCS();
    CHECK_THROWS_AS(productWithTerminated(T, Y), NoMapToTerminated);
}

TEST_CASE("product cones mediate uniquely through the factor") {
    CoarseSpace T = terminalRayCS();
    CoarseSpace Y = metricRayCS();
    TerminatedProductResult p = productWithTerminated(T, Y);
    CoarseSpace W = metricRayCS();
    Cone cone{W, {composeMaps(p.projT, shiftUp(W.space, 3)), shiftUp(W.space, 3)}};
    ConeReport rep = verifyCone(p, T, cone);
    CHECK(rep.exists.in());
    CHECK(rep.unique.in());
    REQUIRE(rep.mediator.has_value());
    CHECK(checkClose(*rep.mediator, shiftUp(W.space, 3), W, Y).in());
}

TEST_CASE("image of a subspace inclusion is the subspace itself") {
    Space sp = raySp();
    StructurePtr sub = StructureDescr::subspace(StructureDescr::metricDiscrete(sp), evens(sp));
    CoarseSpace Y = CoarseSpace::of(sub);
    CoarseSpace X = metricRayCS();
    ImageResult im = image(idOn(sp), Y, X);
    CHECK(structureEq(im.object.structure, sub, 8).in());
    CHECK(im.monic.in());
}

TEST_CASE("image under a shift matches the set-image subspace") {
    CoarseSpace Y = metricRayCS();
    CoarseSpace X = metricRayCS();
    EAMap f = shiftUp(Y.space, 1);
    ImageResult im = image(f, Y, X);
    CoarseSpace Sub = CoarseSpace::of(StructureDescr::subspace(
        X.structure, PointSet::ofRay(X.space, "r0", UPSet::fromIndex(1))));
    CHECK(equivalenceWitness(im.object, Sub, f, shiftDown(Y.space)).in());
}

TEST_CASE("connected hull computations") {
    CoarseSpace Y = idealOriginCS();
    // One metric cluster: the hull of any nonempty image is everything.
    CoarseSpace X = metricRayCS();
    CHECK(connectedHull(constAt(Y.space, X.space, {"r0", 0}), Y, X) ==
          PointSet::full(X.space));
    // A discrete two-point target: only the hit component is reached.
    Space two = Space::points(2);
    CoarseSpace D = CoarseSpace::of(StructureDescr::metricDiscrete(two));
    CHECK(connectedHull(constAt(Y.space, two, {"p0", 0}), Y, D) ==
          PointSet::ofPoints(two, {{"p0", 0}}));
    // Equality-only structures: the hull is exactly the image.
    CoarseSpace I = CoarseSpace::of(StructureDescr::initial(raySp()));
    CHECK(connectedHull(constAt(Y.space, I.space, {"r0", 5}), Y, I) ==
          PointSet::ofRay(I.space, "r0", UPSet::single(5)));
}

TEST_CASE("gluing two rays onto one is not monic") {
    Space ab = Space::make({{"a", CompKind::Ray}, {"b", CompKind::Ray}});
    CoarseSpace Y = CoarseSpace::of(StructureDescr::metricDiscrete(ab));
    CoarseSpace X = metricRayCS();
    EAMap fold = EAMap::make(ab, X.space, {},
                             {{"a", RayRule{{}, AffineTail{1, 0, "r0"}}},
                              {"b", RayRule{{}, AffineTail{1, 0, "r0"}}}});
    Verdict m = isMonic(fold, Y, X);
    CHECK(m.out());
    CHECK_FALSE(m.rels.empty());
}

TEST_CASE("the identity-as-set map from metric to terminal is epi") {
    CoarseSpace M = metricRayCS();
    CoarseSpace T = terminalRayCS();
    CHECK(isEpi(idOn(M.space), M, T).in());
}

TEST_CASE("a map missing a component is not epi") {
    CoarseSpace Y = idealOriginCS();
    Space two = Space::points(2);
    CoarseSpace D = CoarseSpace::of(StructureDescr::metricDiscrete(two));
    Verdict e = isEpi(constAt(Y.space, two, {"p0", 0}), Y, D);
    CHECK(e.out());
}

TEST_CASE("coimage restricts to the hull with supports near the image") {
    CoarseSpace Y = idealOriginCS();
    Space two = Space::points(2);
    CoarseSpace D = CoarseSpace::of(StructureDescr::metricDiscrete(two));
    CoimageResult c = coimage(constAt(Y.space, two, {"p0", 0}), Y, D);
    CHECK(c.carrier == PointSet::ofPoints(two, {{"p0", 0}}));
    CHECK(c.epi.in());
    CHECK(contains(c.object.structure, Relation::singlePair(two, {"p0", 0}, {"p1", 0}))
              .out());
}

TEST_CASE("classification requires coarse maps") {
    CoarseSpace X = metricRayCS();
    EAMap c0 = constAt(X.space, X.space, {"r0", 0});
    CHECK_THROWS_AS(isMonic(c0, X, X), NotCoarse);
    CHECK_THROWS_AS(isEpi(c0, X, X), NotCoarse);
    CHECK_THROWS_AS(image(c0, X, X), NotCoarse);
}

TEST_CASE("the origin ideal is equivalent to a point") {
    CoarseSpace X = idealOriginCS();
    Space pt = Space::point("p0");
    CoarseSpace P = CoarseSpace::of(StructureDescr::terminal(pt));
    EAMap f = constAt(X.space, pt, {"p0", 0});
    EAMap g = constAt(pt, X.space, {"r0", 0});
    CHECK(equivalenceWitness(X, P, f, g).in());
}

TEST_CASE("a shifted copy of the metric ray is equivalent to it") {
    CoarseSpace X = metricRayCS();
    CoarseSpace S = CoarseSpace::of(StructureDescr::subspace(
        X.structure, PointSet::ofRay(X.space, "r0", UPSet::fromIndex(5))));
    EAMap f = shiftUp(X.space, 5);
    EAMap g = EAMap::make(
        X.space, X.space, {},
        {{"r0", RayRule{{Point{"r0", 0}, Point{"r0", 0}, Point{"r0", 0}, Point{"r0", 0},
                         Point{"r0", 0}},
                        AffineTail{1, -5, "r0"}}}});
    CHECK(equivalenceWitness(X, S, f, g).in());
}

TEST_CASE("non-inverse maps fail the equivalence check") {
    CoarseSpace X = metricRayCS();
    CHECK_FALSE(
        equivalenceWitness(X, X, doubling(X.space), idOn(X.space)).in());
}

TEST_CASE("banded spaces terminate into the terminal ray") {
    Space sp = mixedSpace();
    CoarseSpace X = CoarseSpace::of(StructureDescr::metricDiscrete(sp));
    CoarseSpace R = terminalRayCS();
    CHECK(terminates(X, R).in());
    // A space with rays cannot inject into a finite point space.
    CoarseSpace Rp = CoarseSpace::of(StructureDescr::terminal(Space::points(2)));
    CHECK(terminates(X, Rp).out());
    // The reference space must carry a terminated structure.
    CHECK_THROWS_AS(terminates(X, metricRayCS()), InvalidArgument);
}

TEST_CASE("single-object diagrams pass through the finite limit and colimit") {
    CoarseSpace X = metricRayCS();
    Diagram d;
    d.objects = {X};
    DiagramCone colim = colimitFinite(d);
    CHECK(structureEq(colim.object.structure, X.structure, 8).in());
    DiagramCone lim = limitFinite(d);
    CHECK(structureEq(lim.object.structure, X.structure, 8).in());
}

TEST_CASE("colimit of a two-object diagram coequalizes the arrow") {
    CoarseSpace X = metricRayCS();
    Diagram d;
    d.objects = {X, X};
    d.arrows.push_back({0, 1, shiftUp(X.space, 1)});
    DiagramCone colim = colimitFinite(d);
    CHECK(colim.legs.size() == 2);
    // Both legs are coarse into the colimit and the square commutes up to
    // closeness.
    CHECK(checkCoarse(colim.legs[0], X, colim.object).coarse());
    CHECK(checkCoarse(colim.legs[1], X, colim.object).coarse());
    CHECK(checkClose(composeMaps(colim.legs[1], d.arrows[0].map), colim.legs[0], X,
                     colim.object)
              .in());
}

TEST_CASE("general infinite products are rejected") {
    CoarseSpace X = metricRayCS();
    Diagram d;
    d.objects = {X, X};
    CHECK_THROWS_AS(limitFinite(d), UnsupportedProduct);
}

TEST_CASE("terminated-factor diagrams are within the limit fragment") {
    Diagram d;
    d.objects = {terminalRayCS(), metricRayCS()};
    DiagramCone lim = limitFinite(d);
    CHECK(structureEq(lim.object.structure, StructureDescr::metricDiscrete(raySp()), 8)
              .in());
    CHECK(lim.legs.size() == 2);
}

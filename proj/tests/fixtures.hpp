// Small trees with known reductions, in bracket form.
#pragma once

namespace fixture {

// 15 vertices; 5 classes unordered (one edge of multiplicity 2), 6 ordered.
inline constexpr const char* kFifteen = "((((())())((())()))()(()(())))";
// 11 vertices; 5 classes unordered, 6 ordered. Forest partner of kFifteen.
inline constexpr const char* kEleven = "(((())())()((()(()))))";

// Pair of height-3 trees with six leaves each and no shared internal subtree.
inline constexpr const char* kPairT0 = "((()(()())(()()())))";
inline constexpr const char* kPairT1 = "((()(())(()()()())))";
// Same T0, and a variant of kPairT1 with an extra leaf under the root.
inline constexpr const char* kModelT1 = "(()(()(())(()()()())))";

// html > body > four blocks, the third holding three, the middle of which
// nests two more levels. 12 elements, height 5.
inline constexpr const char* kPage = R"(<!DOCTYPE html>
<html>
  <body>
    <h1>Title</h1>
    <p class="intro">Some <!-- ignored --> text</p>
    <div id="main">
      <img src="a.png">
      <ul>
        <li><a href="x">one</a><a href="y">two</a></li>
      </ul>
      <br/>
    </div>
    <p>end</p>
  </body>
</html>
)";

}  // namespace fixture

# Copyright (c) 2026, The Luthier Authors
# SPDX-License-Identifier: Apache-2.0
"""Writes the three-exam synthetic scholar corpus."""

import json
import pathlib

DOCS = pathlib.Path(__file__).parent / "docs"

MATHS_SUJET = [
    r"""Baccalauréat général, épreuve de mathématiques, session 2021.
Le sujet comporte deux exercices indépendants. La calculatrice est autorisée.

Exercice 1
On considère la suite $(u_n)$ définie par $u_0 = 1$ et, pour tout entier naturel $n$, par $u_{n+1} = \frac{1}{2} u_n + 3$.
1. Calculer $u_1$ et $u_2$.
2. Montrer par récurrence que, pour tout entier naturel $n$, on a $u_n \leq 6$.
3. On pose $v_n = u_n - 6$. Montrer que la suite $(v_n)$ est géométrique et préciser sa raison.""",
    r"""Exercice 2
Soit $f$ la fonction définie pour tout réel $x > 0$ par $f(x) = x \ln(x) - x$. On note $\mathcal{C}$ sa courbe représentative dans un repère orthonormé.
1. Déterminer la limite de $f(x)$ lorsque $x$ tend vers $+\infty$.
2. Étudier les variations de la fonction $f$.
a) Calculer $f'(x)$ pour tout réel $x > 0$.
b) En déduire le tableau de variations de $f$.
3. Justifier que l'équation $f(x) = 0$ admet une unique solution $\alpha$ sur l'intervalle $\left[1 ; +\infty\right[$ et donner sa valeur exacte.""",
]

MATHS_CORRIGE = [
    r"""Corrigé de l'épreuve de mathématiques, session 2021. Les résultats sont donnés avec leur justification.

Exercice 1
1. $u_1 = 3{,}5$ et $u_2 = 4{,}75$.
2. Initialisation : $u_0 = 1 \leq 6$. Hérédité : si $u_n \leq 6$, alors $\frac{1}{2} u_n + 3 \leq \frac{1}{2} \times 6 + 3 = 6$, donc $u_{n+1} \leq 6$. La propriété est vraie pour tout $n$.
3. On a $v_{n+1} = u_{n+1} - 6 = \frac{1}{2} u_n - 3 = \frac{1}{2} (u_n - 6) = \frac{1}{2} v_n$. La suite $(v_n)$ est donc géométrique de raison $\frac{1}{2}$ et de premier terme $v_0 = -5$.""",
    r"""Exercice 2
1. Pour $x > 1$, on écrit $f(x) = x (\ln(x) - 1)$. Comme $\ln(x) - 1$ tend vers $+\infty$, le produit tend vers $+\infty$ : la limite de $f$ en $+\infty$ est $+\infty$.
2.
a) Pour tout $x > 0$, on a $f'(x) = \ln(x) + x \times \frac{1}{x} - 1 = \ln(x)$, d'après la formule de dérivation d'un produit.
b) La dérivée $\ln(x)$ est négative sur l'intervalle $\left]0 ; 1\right]$ et positive ensuite, donc $f$ est décroissante puis croissante, avec un minimum $f(1) = -1$.
3. La fonction $f$ est continue et strictement croissante sur cet intervalle, avec $f(1) = -1 < 0$ et une limite infinie. L'équation $f(x) = 0$ équivaut à $\ln(x) = 1$, donc l'unique solution est $\alpha = e$.""",
]

PC_SUJET = [
    r"""Baccalauréat, épreuve de physique-chimie, session 2019. Durée de l'épreuve : trois heures trente.

Exercice 1
Une balle de masse $m = 0{,}50$ kg est lâchée sans vitesse initiale depuis une hauteur $h = 20$ m. On néglige les frottements de l'air et on prend $g = 9{,}8$ m/s².
1. Établir l'expression de la vitesse $v$ de la balle au moment où elle touche le sol.
2. Calculer la durée de la chute.
3. Déterminer l'énergie cinétique de la balle juste avant l'impact avec le sol.""",
    r"""Exercice 2
On dispose d'une solution aqueuse d'acide éthanoïque de concentration $c = 1{,}0 \times 10^{-2}$ mol/L. Le pH mesuré de cette solution vaut $3{,}4$ à la température de vingt-cinq degrés.
1. En utilisant le résultat de l'exercice 3, calculer la concentration en ions oxonium de la solution.
2. Écrire l'équation de la réaction de l'acide éthanoïque avec l'eau.
3. Indiquer si l'acide éthanoïque est un acide fort ou un acide faible, en justifiant la réponse.""",
]

PC_CORRIGE = [
    r"""Corrigé de l'épreuve de physique-chimie, session 2019, avec tous les éléments de justification attendus.

Exercice 1
1. La conservation de l'énergie mécanique donne $\frac{1}{2 m v^2 = m g h$, soit $v = \sqrt{2 g h}$ et numériquement $v \approx 19{,}8$ m/s.
2. [en] The fall lasts $t = \sqrt{2h/g}$, which is about two seconds.
3. L'énergie cinétique vaut $E_c = \frac{1}{2} m v^2 = m g h$, soit environ $98$ J juste avant l'impact.""",
    r"""Exercice 2
1. On a $[\mathrm{H_3O^+}] = 10^{-\mathrm{pH}} = 10^{-3{,}4} \approx 4{,}0 \times 10^{-4}$ mol/L, ce qui se calcule directement à partir du pH.
2. L'équation de la réaction s'écrit $\mathrm{CH_3COOH} + \mathrm{H_2O} \rightleftharpoons \mathrm{CH_3COO^-} + \mathrm{H_3O^+}$, avec un équilibre.
Les autres réponses de cet exercice ne sont pas corrigées dans ce document, faute de place dans la version distribuée aux candidats.""",
]

NSI_SUJET = [
    r"""Baccalauréat, épreuve de numérique et sciences informatiques, session 2024. Le sujet comporte un seul exercice.

Exercice 1
On s'intéresse à la représentation des entiers naturels en binaire et à quelques algorithmes élémentaires de parcours de listes.
1. Donner l'écriture binaire de l'entier $13$.
2. Expliquer pourquoi la recherche dichotomique nécessite une liste triée.""",
]

NSI_CORRIGE_SCANNED = ["Corrigé 2024", "p. 2"]


def write(doc_id, pages, subject, year, kind, exam=None):
    (DOCS / f"{doc_id}.pages.jsonl").write_text(
        "".join(json.dumps(p, ensure_ascii=False) + "\n" for p in pages), encoding="utf-8")
    meta = {"subject": subject, "year": year, "kind": kind}
    if exam:
        meta["exam"] = exam
    (DOCS / f"{doc_id}.meta.json").write_text(json.dumps(meta, ensure_ascii=False) + "\n", encoding="utf-8")


def main() -> None:
    DOCS.mkdir(exist_ok=True)
    write("bac-2021-maths-sujet", MATHS_SUJET, "Mathematics", 2021, "subject-sheet")
    write("bac-2021-maths-corrige", MATHS_CORRIGE, "Mathematics", 2021, "solution-sheet")
    write("bac-2019-pc-sujet", PC_SUJET, "Physics-Chemistry", 2019, "subject-sheet")
    write("bac-2019-pc-corrige", PC_CORRIGE, "Physics-Chemistry", 2019, "solution-sheet")
    write("bac-2024-nsi-sujet", NSI_SUJET, "Computer Science", 2024, "subject-sheet")
    write("bac-2024-nsi-scan", NSI_CORRIGE_SCANNED, "Computer Science", 2024, "solution-sheet",
          exam="bac-2024-nsi")


if __name__ == "__main__":
    main()

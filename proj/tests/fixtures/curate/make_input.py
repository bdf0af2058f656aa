# Copyright (c) 2026, The Luthier Authors
# SPDX-License-Identifier: Apache-2.0
"""Writes the 50-line mixed curate fixture and the mock model's translation table."""

import json
import pathlib

HERE = pathlib.Path(__file__).parent


def conv(cid, source, *turns, system=None, subject=None):
    messages = [{"role": "system", "content": system}] if system else []
    for i, t in enumerate(turns):
        messages.append({"role": "user" if i % 2 == 0 else "assistant", "content": t})
    rec = {"id": cid, "source": source, "messages": messages}
    if subject:
        rec["subject"] = subject
    return rec


FRENCH = [
    ("Quelle est la capitale de la France et pourquoi est-elle devenue si importante au fil des siècles ?",
     "Paris est la capitale de la France. Elle doit son importance à sa position sur la Seine, au pouvoir royal qui s'y est installé et à son rôle culturel."),
    ("Peux-tu m'expliquer la différence entre le passé composé et l'imparfait en français ?",
     "Le passé composé exprime une action achevée et ponctuelle, alors que l'imparfait décrit une situation, une habitude ou une action en cours dans le passé."),
    ("Comment préparer une pâte à crêpes sans grumeaux pour quatre personnes ?",
     "Il faut verser le lait petit à petit sur la farine tout en fouettant, puis ajouter les œufs, une pincée de sel et laisser reposer la pâte une heure."),
    ("Quels sont les principaux affluents de la Loire ?",
     "Les principaux affluents de la Loire sont l'Allier, le Cher, l'Indre, la Vienne et la Maine, qui drainent une grande partie du centre de la France."),
    ("Résume en quelques phrases l'intrigue du roman Germinal d'Émile Zola.",
     "Étienne Lantier arrive dans un bassin minier du Nord, découvre la misère des mineurs et mène une grève longue et violente qui se termine par un échec."),
    ("Pourquoi le ciel est-il bleu pendant la journée ?",
     "La lumière du soleil est diffusée par les molécules de l'atmosphère, et cette diffusion est beaucoup plus forte pour les courtes longueurs d'onde, donc pour le bleu."),
    ("Donne-moi trois conseils pour mieux dormir la nuit.",
     "Il vaut mieux se coucher à heure fixe, éviter les écrans avant de dormir et garder une chambre fraîche, calme et sombre."),
    ("Qu'est-ce que la photosynthèse et quel est son rôle pour les plantes ?",
     "La photosynthèse permet aux plantes de fabriquer leur propre matière organique à partir de la lumière, de l'eau et du dioxyde de carbone, en libérant du dioxygène."),
    ("Explique le théorème de Pythagore avec un exemple simple.",
     "Dans un triangle rectangle, le carré de l'hypoténuse est égal à la somme des carrés des deux autres côtés. Avec des côtés de trois et quatre, l'hypoténuse mesure cinq."),
    ("Quelle est la différence entre la météo et le climat ?",
     "La météo décrit le temps qu'il fait sur une courte période, tandis que le climat correspond aux conditions moyennes observées sur plusieurs décennies."),
    ("Comment rédiger une lettre de motivation efficace pour un stage ?",
     "Il faut présenter son parcours, montrer ce que l'on connaît de l'entreprise et expliquer clairement ce que l'on peut lui apporter pendant le stage."),
    ("Pourquoi les feuilles des arbres changent-elles de couleur en automne ?",
     "La chlorophylle se dégrade quand les jours raccourcissent, ce qui laisse apparaître les pigments jaunes et orangés déjà présents dans les feuilles."),
    ("Quels sont les avantages du vélo en ville ?",
     "Le vélo est rapide sur les petites distances, ne pollue pas, coûte peu et permet de faire de l'exercice physique tous les jours."),
    ("Qui était Marie Curie et quelles sont ses principales découvertes ?",
     "Marie Curie était une physicienne et chimiste qui a découvert le polonium et le radium. Elle a reçu deux prix Nobel, en physique puis en chimie."),
    ("Comment calculer la moyenne pondérée de mes notes ?",
     "On multiplie chaque note par son coefficient, on additionne ces produits puis on divise le total par la somme des coefficients."),
    ("Quelles sont les règles de base de la pétanque ?",
     "Deux équipes lancent leurs boules le plus près possible du cochonnet. L'équipe dont la boule est la plus proche marque un point par boule mieux placée."),
    ("Comment fonctionne une éolienne pour produire de l'électricité ?",
     "Le vent fait tourner les pales, qui entraînent un alternateur placé dans la nacelle. Ce dernier transforme l'énergie mécanique en énergie électrique."),
    ("Quel est le rôle du Sénat dans les institutions françaises ?",
     "Le Sénat examine et vote les lois avec l'Assemblée nationale, contrôle l'action du gouvernement et représente les collectivités territoriales."),
]

MULTI_TURN = [
    ("Je voudrais apprendre à jouer de la guitare. Par où commencer ?",
     "Commence par apprendre quelques accords simples comme la mineur, mi mineur et ré majeur, puis entraîne-toi à passer de l'un à l'autre.",
     "Combien de temps faut-il pratiquer chaque jour pour progresser ?",
     "Une vingtaine de minutes par jour suffisent au début, à condition de pratiquer régulièrement plutôt que longtemps une seule fois par semaine."),
    ("Quelle est la meilleure saison pour visiter la Bretagne ?",
     "Le printemps et le début de l'automne sont agréables, avec moins de monde et des températures douces sur la côte.",
     "Et quelles villes me conseilles-tu de voir en priorité ?",
     "Saint-Malo, Quimper, Vannes et Dinan sont très belles, chacune avec son centre ancien et son atmosphère particulière."),
]

ENGLISH_TRANSLATED = [
    ("How do I make a good cup of coffee at home?",
     "Comment préparer une bonne tasse de café à la maison ?"),
    ("What are the main causes of the French Revolution?",
     "Quelles sont les principales causes de la Révolution française ?"),
    ("Explain how vaccines help the immune system.",
     "Explique comment les vaccins aident le système immunitaire."),
    ("Write a short poem about the sea.",
     "Écris un court poème sur la mer."),
    ("What is the difference between a virus and a bacterium?",
     "Quelle est la différence entre un virus et une bactérie ?"),
    ("Give me some tips to learn a new language quickly.",
     "Donne-moi quelques conseils pour apprendre rapidement une nouvelle langue."),
    ("Why do cats purr when they are happy?",
     "Pourquoi les chats ronronnent-ils lorsqu'ils sont contents ?"),
    ("Summarize the plot of Romeo and Juliet in a few sentences.",
     "Résume l'intrigue de Roméo et Juliette en quelques phrases."),
    ("How does a rainbow form after the rain?",
     "Comment un arc-en-ciel se forme-t-il après la pluie ?"),
    ("What should I pack for a week of hiking in the mountains?",
     "Que dois-je emporter pour une semaine de randonnée en montagne ?"),
    ("Can you explain what inflation is and why it matters?",
     "Peux-tu expliquer ce qu'est l'inflation et pourquoi elle est importante ?"),
    ("List the planets of the solar system in order from the sun.",
     "Énumère les planètes du système solaire dans l'ordre à partir du soleil."),
]


def main() -> None:
    rows = []
    translations = {}
    n = 0

    def add(rec):
        nonlocal n
        n += 1
        rows.append(json.dumps(rec, ensure_ascii=False))

    for i, (q, a) in enumerate(FRENCH):
        add(conv(f"fr-{i:02d}", "fr-native", q, a, subject="general"))
    for i, turns in enumerate(MULTI_TURN):
        add(conv(f"fr-multi-{i}", "fr-native", *turns, subject="general"))
    add(conv("fr-system", "fr-native",
             "Quels monuments faut-il absolument voir lors d'une première visite à Rome ?",
             "Le Colisée, le Panthéon, la fontaine de Trevi et la basilique Saint-Pierre sont incontournables pour une première visite.",
             system="Tu es un guide touristique qui répond toujours en français de façon concise.",
             subject="general"))
    # Near duplicates of fr-00 and fr-05: same user turns after case folding and whitespace collapsing.
    add(conv("fr-dup-exact", "fr-native", FRENCH[0][0], "Paris, sans hésitation.", subject="general"))
    add(conv("fr-dup-spacing", "fr-native", "  pourquoi le ciel est-il   BLEU pendant la journée ?",
             "À cause de la diffusion de la lumière par l'air.", subject="general"))
    # Code-heavy samples fail the content judge.
    add(conv("fr-code-0", "fr-code",
             "Écris une fonction Python qui renvoie la somme des éléments d'une liste de nombres entiers.",
             "Voici une solution possible :\n```python\ndef somme(liste):\n    return sum(liste)\n```\nElle parcourt la liste et renvoie le total.",
             subject="code"))
    add(conv("fr-code-1", "fr-code",
             "Comment inclure une bibliothèque standard dans un programme écrit en langage C ?",
             "On utilise la directive #include en tête du fichier, par exemple #include <stdio.h> pour les entrées et sorties.",
             subject="code"))
    add(conv("fr-code-2", "fr-code",
             "Donne un exemple de fonction JavaScript qui affiche un message de bienvenue dans la console.",
             "Voici un exemple : function bienvenue() { console.log('Bonjour et bienvenue !'); } que l'on appelle ensuite simplement.",
             subject="code"))
    # French text with English passages fails the linguistic judge.
    add(conv("fr-mixed-0", "fr-native",
             "Peux-tu corriger ma phrase ? Je voudrais dire que le projet avance bien et que l'équipe est motivée.",
             "Bien sûr : le projet avance bien et l'équipe est très motivée. In English you would say the project is going well and the team is motivated.",
             subject="general"))
    add(conv("fr-mixed-1", "fr-native",
             "Quelle est la traduction de cette expression et comment l'utiliser dans une conversation de tous les jours ?",
             "L'expression signifie « il pleut des cordes ». The idiom is used to say that it is raining hard, and the tone of the phrase is informal.",
             subject="general"))
    # The judges answer neither True nor False here.
    add(conv("fr-maybe", "fr-native",
             "Qui est Zorglub dans les aventures de Spirou et Fantasio, et pourquoi est-il si célèbre ?",
             "Zorglub est un savant excentrique créé par Franquin. Il est célèbre pour ses inventions délirantes et son langage à l'envers.",
             subject="general"))
    for i, (en, fr) in enumerate(ENGLISH_TRANSLATED):
        add(conv(f"en-{i:02d}", "openhermes", en,
                 "Here is a detailed answer written in English that the pipeline will discard and regenerate.",
                 subject="general"))
        translations[en] = fr
    # Translated system prompt.
    add(conv("en-system", "openhermes", "Recommend three classic novels for a teenager who enjoys adventure stories.",
             "Treasure Island, The Count of Monte Cristo and Around the World in Eighty Days are all great choices.",
             system="You are a helpful librarian who answers briefly.", subject="general"))
    translations["You are a helpful librarian who answers briefly."] = "Tu es un bibliothécaire serviable qui répond brièvement."
    translations["Recommend three classic novels for a teenager who enjoys adventure stories."] = (
        "Recommande trois romans classiques à un adolescent qui aime les histoires d'aventure.")
    # Missing from the translation table: the mock returns an empty reply.
    add(conv("en-untranslatable", "openhermes",
             "Describe the taste of a fruit that nobody has ever eaten before in great detail.",
             "It would taste like a mix of mango and lime with a hint of pepper.", subject="general"))
    # English from a source outside translate_sources is dropped.
    for i, (q, a) in enumerate([
        ("What is the tallest mountain in the world and how high is it?",
         "Mount Everest is the tallest mountain in the world, at about 8,849 metres above sea level."),
        ("How many players are there on a football team during a match?",
         "Each team has eleven players on the field, including the goalkeeper, during a standard match."),
        ("What is the boiling point of water at sea level in Celsius?",
         "Water boils at one hundred degrees Celsius at sea level under standard atmospheric pressure."),
    ]):
        add(conv(f"other-en-{i}", "web-en", q, a, subject="general"))
    # Too short to identify.
    add(conv("short", "fr-native", "Salut !", "Bonjour !", subject="general"))
    # Already regenerated elsewhere: a conversation missing its assistant turn.
    add(conv("fr-incomplete", "fr-native",
             "Quels sont les ingrédients nécessaires pour préparer une ratatouille provençale traditionnelle ?",
             subject="general"))
    # Malformed line.
    rows.append('{"id": "broken", "source": "fr-native", "messages": "pas une liste"}')
    n += 1
    # Second French multi-turn about science.
    add(conv("fr-science", "fr-native",
             "Pourquoi la Lune présente-t-elle toujours la même face à la Terre ?",
             "Sa période de rotation sur elle-même est égale à sa période de révolution autour de la Terre, à cause des effets de marée.",
             subject="science"))
    assert n == 50, n
    (HERE / "input.jsonl").write_text("\n".join(rows) + "\n", encoding="utf-8")
    (HERE / "translations.json").write_text(
        json.dumps(translations, ensure_ascii=False, indent=2, sort_keys=True) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()

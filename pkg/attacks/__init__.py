from attacks.base import (ATTACK_SUITES, Attack, apply_attack, attack_classes, build_attack, expand_attacks,
                          parse_attack)

from enum import Enum


class CaseTag(Enum):
    I = 0
    II_A = 1
    II_B = 2
    III = 3

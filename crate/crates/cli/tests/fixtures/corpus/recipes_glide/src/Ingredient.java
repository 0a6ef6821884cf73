package com.demo.recipes;

public class Ingredient {
    String label;
    double grams;
}
